#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "lsi/baselines.hpp"
#include "lsi/datagen.hpp"
#include "oracles.hpp"

using namespace lsi;

TEST_CASE("sorted_pairs build is a stable sort of (key, position)") {
    const std::vector<uint64_t> base = {30, 10, 20};
    const auto idx = SortedPairsIndex::build(base);
    const std::vector<std::pair<uint64_t, uint64_t>> want = {{10, 1}, {20, 2}, {30, 0}};
    CHECK(std::ranges::equal(idx.pairs(), want));
    CHECK(idx.size_bytes() == 16 * 3);

    const std::vector<uint64_t> sorted_base = {1, 2, 3};
    const auto idx2 = SortedPairsIndex::build(sorted_base);
    CHECK(idx2.pairs()[0].second == 0);
    CHECK(idx2.pairs()[2].second == 2);

    CHECK_THROWS_AS(SortedPairsIndex::build({}), std::invalid_argument);
}

TEST_CASE("sorted_pairs lower_bound contract") {
    const std::vector<uint64_t> base = {30, 10, 20};
    const auto idx = SortedPairsIndex::build(base);
    CHECK(idx.lower_bound(1)->rank == 0);
    CHECK(idx.lower_bound(1)->base_index == 1);
    CHECK(!idx.lower_bound(31).has_value());
    CHECK(idx.lower_bound(20)->base_index == 2);
}

TEST_CASE("sorted_pairs agrees with the oracle on random queries") {
    std::mt19937_64 rng(113);
    auto base = generate({Family::kUniformSparse, 20000, 113, 0.0});
    const auto sorted = oracle::sorted_copy(base);
    const auto idx = SortedPairsIndex::build(base);
    for (int t = 0; t < 10000; ++t) {
        const uint64_t q = (t & 1) ? base[rng() % base.size()] : rng();
        const auto got = idx.lower_bound(q);
        const auto want = oracle::lower_bound_rank(sorted, q);
        if (!want) {
            REQUIRE(!got.has_value());
        } else {
            REQUIRE(got.has_value());
            REQUIRE(got->rank == *want);
            REQUIRE(base[got->base_index] == sorted[*want]);
        }
    }
}

TEST_CASE("robin hood table: equality over duplicates, multiset semantics") {
    std::mt19937_64 rng(127);
    std::vector<uint64_t> base(20000);
    for (auto& k : base) k = rng() % 5000;
    const auto t = RobinHoodTable::build(base);
    CHECK(t.size() == base.size());
    for (int i = 0; i < 5000; ++i) {
        const uint64_t q = rng() % 5500;
        auto got = t.equality(q);
        auto want = oracle::equality_scan(base, q);
        std::sort(got.begin(), got.end());
        REQUIRE(got == want);
    }
    CHECK(t.equality(~uint64_t(0)).empty());
}

TEST_CASE("robin hood table honors the load factor and slot layout") {
    std::vector<uint64_t> base(1000);
    std::iota(base.begin(), base.end(), uint64_t(0));
    const auto t = RobinHoodTable::build(base);
    CHECK(t.capacity() * 3 >= base.size() * 4); // load <= 0.75
    CHECK(t.size_bytes() >= 16ULL * base.size() * 4 / 3);

    // probe-sequence-length bookkeeping is consistent for every occupied slot
    for (uint64_t i = 0; i < t.capacity(); ++i) {
        const int16_t d = t.probe_length_at(i);
        if (d < 0) continue;
        const uint64_t home = t.home_of(t.key_at(i));
        CHECK(((i + t.capacity()) - home) % t.capacity() == static_cast<uint64_t>(d));
    }
}

TEST_CASE("robin hood: three duplicates come back, absent keys do not") {
    const std::vector<uint64_t> base = {8, 1, 8, 4, 8};
    const auto t = RobinHoodTable::build(base);
    auto got = t.equality(8);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<uint64_t>{0, 2, 4});
    CHECK(t.equality(9).empty());
}
