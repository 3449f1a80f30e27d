#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lsi/cdf.hpp"
#include "lsi/datagen.hpp"
#include "lsi/hist_tree.hpp"
#include "lsi/spline_model.hpp"
#include "oracles.hpp"

using namespace lsi;

namespace {

// interpolation over the knot sequence, written independently of
// SplineModel::predict
long double interp_at(const std::vector<CdfPoint>& knots, uint64_t q) {
    auto it = std::upper_bound(knots.begin(), knots.end(), q,
                               [](uint64_t v, const CdfPoint& p) { return v < p.key; });
    if (it == knots.end()) return static_cast<long double>(knots.back().rank);
    REQUIRE(it != knots.begin());
    const CdfPoint& a = *(it - 1);
    const CdfPoint& b = *it;
    return a.rank + static_cast<long double>(q - a.key) /
                        static_cast<long double>(b.key - a.key) *
                        static_cast<long double>(b.rank - a.rank);
}

void check_fit(const std::vector<CdfPoint>& cdf, uint64_t eps) {
    const auto knots = fit_spline(cdf, eps);
    REQUIRE(knots.front() == cdf.front());
    REQUIRE(knots.back().key == cdf.back().key);
    for (size_t i = 1; i < knots.size(); ++i) REQUIRE(knots[i - 1].key < knots[i].key);
    for (const CdfPoint& p : cdf) {
        const long double dev = interp_at(knots, p.key) - static_cast<long double>(p.rank);
        REQUIRE(fabsl(dev) <= static_cast<long double>(eps) + 1e-6L);
    }
}

std::vector<uint64_t> sorted_dataset(Family family, uint64_t n, double dup, uint64_t seed) {
    auto keys = generate({family, n, seed, dup});
    std::sort(keys.begin(), keys.end());
    return keys;
}

} // namespace

TEST_CASE("build_cdf collapses duplicates to first-occurrence ranks") {
    const std::vector<uint64_t> a = {10, 20, 30};
    CHECK(build_cdf(a) == std::vector<CdfPoint>{{10, 0}, {20, 1}, {30, 2}});

    const std::vector<uint64_t> b = {5, 5, 5, 9};
    CHECK(build_cdf(b) == std::vector<CdfPoint>{{5, 0}, {9, 3}});

    // duplicate-heavy input: one point per distinct key
    auto keys = sorted_dataset(Family::kTimestampsWithDuplicates, 20000, 0.5, 3);
    const auto cdf = build_cdf(keys);
    auto distinct = keys;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    CHECK(cdf.size() == distinct.size());
}

TEST_CASE("build_cdf rejects unsorted and empty input") {
    CHECK_THROWS_AS(build_cdf(std::vector<uint64_t>{3, 1}), std::logic_error);
    CHECK_THROWS_AS(build_cdf(std::vector<uint64_t>{}), std::invalid_argument);
}

TEST_CASE("fit_spline: a perfectly linear cdf needs only the endpoints") {
    std::vector<CdfPoint> cdf(1000);
    for (uint64_t i = 0; i < 1000; ++i) cdf[i] = {i, i};
    for (uint64_t eps : {1ULL, 4ULL, 256ULL}) {
        const auto knots = fit_spline(cdf, eps);
        CHECK(knots.size() == 2);
        CHECK(knots.front() == CdfPoint{0, 0});
        CHECK(knots.back() == CdfPoint{999, 999});
    }
}

TEST_CASE("fit_spline keeps every cdf point within the error bound") {
    std::mt19937_64 rng(23);
    for (Family family : {Family::kUniformSparse, Family::kLognormalMapped,
                          Family::kClustered, Family::kTimestampsWithDuplicates}) {
        for (double dup : {0.0, 0.5}) {
            const auto keys = sorted_dataset(family, 20000, dup, rng());
            const auto cdf = build_cdf(keys);
            for (uint64_t eps : {1ULL, 4ULL, 16ULL, 64ULL, 256ULL}) check_fit(cdf, eps);
        }
    }
}

TEST_CASE("fit_spline: knot count is non-increasing in the error bound") {
    for (Family family : {Family::kLognormalMapped, Family::kClustered}) {
        const auto keys = sorted_dataset(family, 50000, 0.0, 5);
        const auto cdf = build_cdf(keys);
        size_t prev = SIZE_MAX;
        for (uint64_t eps : {4ULL, 16ULL, 64ULL, 256ULL}) {
            const size_t count = fit_spline(cdf, eps).size();
            CHECK(count <= prev);
            prev = count;
        }
    }
}

TEST_CASE("fit_spline validates its arguments") {
    CHECK_THROWS_AS(fit_spline(std::vector<CdfPoint>{{1, 0}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_spline(std::vector<CdfPoint>{}, 4), std::invalid_argument);
}

TEST_CASE("spline_lookup_range contains the lower-bound rank for any query") {
    std::mt19937_64 rng(29);
    for (Family family : {Family::kUniformSparse, Family::kLognormalMapped,
                          Family::kClustered, Family::kTimestampsWithDuplicates}) {
        for (double dup : {0.0, 0.6}) {
            const auto keys = sorted_dataset(family, 100000, dup, rng());
            const auto cdf = build_cdf(keys);
            const uint64_t n = keys.size();
            for (uint64_t eps : {4ULL, 64ULL}) {
                const auto m = SplineModel::build(cdf, n, eps);
                for (int t = 0; t < 10000; ++t) {
                    // half present keys, half uniform probes
                    const uint64_t q = (t & 1) ? keys[rng() % n] : rng();
                    const RankRange r = m.lookup_range(q);
                    const auto want = oracle::lower_bound_rank(keys, q);
                    if (!want) {
                        REQUIRE(r.beyond_max);
                        continue;
                    }
                    REQUIRE(!r.beyond_max);
                    REQUIRE(r.lo <= *want);
                    REQUIRE(*want <= r.hi);
                    REQUIRE(r.width() <= 2 * eps + 2);
                }
            }
        }
    }
}

TEST_CASE("spline containment across a long duplicate run") {
    // absent keys in the gap right after a run used to be the hard case
    std::vector<uint64_t> keys(1000, 5);
    keys.push_back(9);
    const auto cdf = build_cdf(keys);
    const auto m = SplineModel::build(cdf, keys.size(), 4);
    for (uint64_t q : {6ULL, 7ULL, 8ULL}) {
        const RankRange r = m.lookup_range(q);
        REQUIRE(!r.beyond_max);
        CHECK(r.lo <= 1000);
        CHECK(1000 <= r.hi);
    }
    CHECK(m.lookup_range(5).lo == 0);
    CHECK(m.lookup_range(4).lo == 0);
    CHECK(m.lookup_range(4).hi == 0);
    CHECK(m.lookup_range(10).beyond_max);
}

TEST_CASE("spline predictions are exact at the domain edges") {
    const auto keys = sorted_dataset(Family::kUniformSparse, 5000, 0.0, 31);
    const auto m = SplineModel::build(build_cdf(keys), keys.size(), 16);
    const RankRange r = m.lookup_range(keys.front());
    CHECK(r.lo <= 0);
    CHECK(0 <= r.hi);
    CHECK(m.predict(keys.front()) == 0);
}

TEST_CASE("radix table narrows to the same knot pair as a global search") {
    const auto keys = sorted_dataset(Family::kLognormalMapped, 50000, 0.0, 37);
    const auto cdf = build_cdf(keys);
    const auto m = SplineModel::build(cdf, keys.size(), 16);
    const auto knots = m.knots();
    const auto table = m.radix_table();
    CHECK(table.front() == 0);
    CHECK(table.back() == knots.size());
    for (size_t b = 1; b < table.size(); ++b) CHECK(table[b - 1] <= table[b]);

    for (const CdfPoint& p : cdf) {
        const uint64_t b = m.radix_prefix(p.key);
        const auto global = std::upper_bound(
            knots.begin(), knots.end(), p.key,
            [](uint64_t v, const CdfPoint& k) { return v < k.key; });
        const uint64_t gi = static_cast<uint64_t>(global - knots.begin());
        REQUIRE(table[b] <= gi);
        REQUIRE(gi <= table[b + 1]);
    }
}

TEST_CASE("spline prediction is monotone in the query") {
    const auto keys = sorted_dataset(Family::kClustered, 30000, 0.3, 41);
    const auto m = SplineModel::build(build_cdf(keys), keys.size(), 16);
    std::mt19937_64 rng(43);
    std::vector<uint64_t> qs(5000);
    for (auto& q : qs)
        q = keys.front() + rng() % (keys.back() - keys.front() + 1);
    std::sort(qs.begin(), qs.end());
    uint64_t prev = 0;
    for (uint64_t q : qs) {
        const uint64_t pred = m.predict(q);
        CHECK(pred >= prev);
        prev = pred;
    }
}

TEST_CASE("spline model size follows the declared layout") {
    const auto keys = sorted_dataset(Family::kLognormalMapped, 100000, 0.0, 47);
    const auto cdf = build_cdf(keys);
    const auto m4 = SplineModel::build(cdf, keys.size(), 4);
    const auto m8 = SplineModel::build(cdf, keys.size(), 8);
    CHECK(m4.size_bytes() ==
          m4.knots().size() * 16 + ((uint64_t(1) << m4.radix_bits()) + 1) * 8);
    CHECK(m4.size_bytes() > m8.size_bytes());
    CHECK(m8.radix_table().size() >= 2);
}

TEST_CASE("hist tree: depth is bounded by the bit budget") {
    const auto keys = sorted_dataset(Family::kUniformSparse, 100000, 0.0, 53);
    const auto m = HistTreeModel::build(build_cdf(keys), keys.size(), 64, 8);
    CHECK(m.depth() <= 8); // ceil(64/8)
}

TEST_CASE("hist tree: every terminal bin is within the error bound or one key") {
    for (Family family : {Family::kUniformSparse, Family::kTimestampsWithDuplicates}) {
        for (double dup : {0.0, 0.7}) {
            const auto keys = sorted_dataset(family, 50000, dup, 59);
            const auto m = HistTreeModel::build(build_cdf(keys), keys.size(), 16, 8);
            m.for_each_terminal([&](uint64_t start, uint64_t end) {
                REQUIRE(start <= end);
                if (end - start > 16) {
                    // long bins must be a single duplicate run
                    REQUIRE(keys[start] == keys[end - 1]);
                }
            });
        }
    }
}

TEST_CASE("hist_tree_lookup_range contains the lower-bound rank for any query") {
    std::mt19937_64 rng(61);
    for (Family family : {Family::kUniformSparse, Family::kLognormalMapped,
                          Family::kClustered, Family::kTimestampsWithDuplicates}) {
        for (double dup : {0.0, 0.6}) {
            const auto keys = sorted_dataset(family, 100000, dup, rng());
            const uint64_t n = keys.size();
            const auto m = HistTreeModel::build(build_cdf(keys), n, 64, 8);
            for (int t = 0; t < 10000; ++t) {
                const uint64_t q = (t & 1) ? keys[rng() % n] : rng();
                const RankRange r = m.lookup_range(q);
                const auto want = oracle::lower_bound_rank(keys, q);
                if (!want) {
                    REQUIRE(r.beyond_max);
                    continue;
                }
                REQUIRE(!r.beyond_max);
                REQUIRE(r.lo <= *want);
                REQUIRE(*want <= r.hi);
            }
        }
    }
}

TEST_CASE("hist tree: empty bins report the next populated rank") {
    // two keys far apart leave the root mostly empty
    const std::vector<uint64_t> keys = {0, uint64_t(1) << 40};
    const auto m = HistTreeModel::build(build_cdf(keys), keys.size(), 4, 8);
    const RankRange r = m.lookup_range(uint64_t(1) << 30);
    CHECK(!r.beyond_max);
    CHECK(r.lo <= 1);
    CHECK(1 <= r.hi);
    CHECK(m.lookup_range(keys.front()).lo == 0);
}

TEST_CASE("hist tree: a single repeated key yields one root terminal") {
    const std::vector<uint64_t> keys(100, 7);
    const auto m = HistTreeModel::build(build_cdf(keys), keys.size(), 4, 8);
    CHECK(m.node_count() == 1);
    const RankRange r = m.lookup_range(7);
    CHECK(r.lo == 0);
    CHECK(!r.beyond_max);
    CHECK(m.lookup_range(8).beyond_max);
}

TEST_CASE("hist tree rejects invalid parameters") {
    const std::vector<CdfPoint> cdf = {{1, 0}};
    CHECK_THROWS_AS(HistTreeModel::build(cdf, 1, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(HistTreeModel::build(cdf, 1, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(HistTreeModel::build(cdf, 1, 4, 17), std::invalid_argument);
}
