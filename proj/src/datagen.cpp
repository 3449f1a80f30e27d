#include "lsi/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace lsi {

const char* family_name(Family f) {
    switch (f) {
        case Family::kUniformDense: return "uniform_dense";
        case Family::kUniformSparse: return "uniform_sparse";
        case Family::kLognormalMapped: return "lognormal_mapped";
        case Family::kClustered: return "clustered";
        case Family::kTimestampsWithDuplicates: return "timestamps_with_duplicates";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    if (name == "uniform_dense") return Family::kUniformDense;
    if (name == "uniform_sparse") return Family::kUniformSparse;
    if (name == "lognormal_mapped") return Family::kLognormalMapped;
    if (name == "clustered") return Family::kClustered;
    if (name == "timestamps_with_duplicates") return Family::kTimestampsWithDuplicates;
    throw std::invalid_argument("unknown dataset family: " + name);
}

namespace {

// Fills `pool` with `m` distinct keys, sorted. `draw` produces one candidate.
template <typename Draw>
void fill_distinct(std::vector<uint64_t>& pool, uint64_t m, Draw&& draw) {
    pool.clear();
    pool.reserve(m);
    for (int round = 0; round < 64; ++round) {
        while (pool.size() < m) pool.push_back(draw());
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.size() == m) return;
    }
    throw std::runtime_error("datagen: could not draw enough distinct keys");
}

std::vector<uint64_t> distinct_pool(Family family, uint64_t m, std::mt19937_64& rng) {
    std::vector<uint64_t> pool;
    switch (family) {
        case Family::kUniformDense:
            pool.resize(m);
            std::iota(pool.begin(), pool.end(), uint64_t(0));
            break;
        case Family::kUniformSparse: {
            std::uniform_int_distribution<uint64_t> dist;
            fill_distinct(pool, m, [&] { return dist(rng); });
            break;
        }
        case Family::kLognormalMapped: {
            // heavy-tailed key mass near the low end of the domain
            std::lognormal_distribution<double> dist(0.0, 2.0);
            constexpr double kScale = 17592186044416.0; // 2^44
            constexpr double kMax = 1.8e19;
            fill_distinct(pool, m, [&] {
                const double v = std::min(dist(rng) * kScale, kMax);
                return static_cast<uint64_t>(v);
            });
            break;
        }
        case Family::kClustered: {
            const uint64_t centers = std::max<uint64_t>(1, m / 1000);
            std::vector<uint64_t> cs(centers);
            std::uniform_int_distribution<uint64_t> cdist(uint64_t(1) << 20, uint64_t(1) << 62);
            for (auto& c : cs) c = cdist(rng);
            std::uniform_int_distribution<uint64_t> pick(0, centers - 1);
            std::normal_distribution<double> off(0.0, 65536.0);
            // keep the offset integral: at center magnitudes near 2^62 a
            // double-valued sum quantizes away the cluster structure
            fill_distinct(pool, m, [&] {
                const uint64_t base = cs[pick(rng)];
                const int64_t d = std::llround(off(rng));
                return d >= 0 ? base + static_cast<uint64_t>(d)
                              : base - std::min(base, static_cast<uint64_t>(-d));
            });
            break;
        }
        case Family::kTimestampsWithDuplicates: {
            pool.resize(m);
            uint64_t t = 1'600'000'000;
            std::uniform_int_distribution<uint64_t> step(1, 4);
            for (uint64_t i = 0; i < m; ++i) {
                pool[i] = t;
                t += step(rng);
            }
            break;
        }
    }
    return pool;
}

} // namespace

std::vector<uint64_t> generate(const DatasetSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generate: n must be >= 1");
    if (spec.duplicate_fraction < 0.0 || spec.duplicate_fraction >= 1.0)
        throw std::invalid_argument("generate: duplicate_fraction must be in [0,1)");

    std::mt19937_64 rng(spec.seed);
    const uint64_t extras =
        std::min<uint64_t>(spec.n - 1, std::llround(spec.duplicate_fraction * spec.n));
    const uint64_t m = spec.n - extras;

    std::vector<uint64_t> keys = distinct_pool(spec.family, m, rng);
    std::uniform_int_distribution<uint64_t> pick(0, m - 1);
    for (uint64_t i = 0; i < extras; ++i) keys.push_back(keys[pick(rng)]);
    std::shuffle(keys.begin(), keys.end(), rng);
    return keys;
}

std::vector<uint64_t> read_sosd(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("read_sosd: cannot open " + path);
    const uint64_t file_size = static_cast<uint64_t>(in.tellg());
    in.seekg(0);

    unsigned char hdr[8];
    if (file_size < 8 || !in.read(reinterpret_cast<char*>(hdr), 8))
        throw std::runtime_error("read_sosd: truncated file " + path);
    uint64_t count = 0;
    for (int j = 0; j < 8; ++j) count |= uint64_t(hdr[j]) << (8 * j);

    if (file_size != 8 + 8 * count)
        throw std::runtime_error("read_sosd: truncated file " + path + " (header count " +
                                 std::to_string(count) + ", byte length " +
                                 std::to_string(file_size) + ")");

    std::vector<uint64_t> keys(count);
    std::vector<unsigned char> buf(8 * count);
    if (count > 0 && !in.read(reinterpret_cast<char*>(buf.data()), buf.size()))
        throw std::runtime_error("read_sosd: read failure on " + path);
    for (uint64_t i = 0; i < count; ++i) {
        uint64_t v = 0;
        for (int j = 0; j < 8; ++j) v |= uint64_t(buf[8 * i + j]) << (8 * j);
        keys[i] = v;
    }
    return keys;
}

void write_sosd(const std::string& path, std::span<const uint64_t> keys) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_sosd: cannot open " + path);
    auto put_u64 = [&](uint64_t v) {
        unsigned char b[8];
        for (int j = 0; j < 8; ++j) b[j] = static_cast<unsigned char>(v >> (8 * j));
        out.write(reinterpret_cast<char*>(b), 8);
    };
    put_u64(keys.size());
    for (uint64_t k : keys) put_u64(k);
    if (!out) throw std::runtime_error("write_sosd: write failure on " + path);
}

namespace {

// oracle folds over a stable-sorted (key, position) copy
std::vector<uint64_t> expected_folds(std::span<const uint64_t> indexed,
                                     std::span<const uint64_t> queries, WorkloadKind kind) {
    std::vector<std::pair<uint64_t, uint64_t>> sorted(indexed.size());
    for (uint64_t i = 0; i < indexed.size(); ++i) sorted[i] = {indexed[i], i};
    std::sort(sorted.begin(), sorted.end());

    std::vector<uint64_t> folds(queries.size());
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        const uint64_t q = queries[qi];
        auto it = std::lower_bound(sorted.begin(), sorted.end(), q,
                                   [](const auto& p, uint64_t v) { return p.first < v; });
        if (kind == WorkloadKind::kLowerBoundAbsent) {
            folds[qi] = it == sorted.end() ? 0 : it->second + 1;
        } else {
            uint64_t sum = 0;
            for (; it != sorted.end() && it->first == q; ++it) sum += it->second + 1;
            folds[qi] = sum;
        }
    }
    return folds;
}

} // namespace

WorkloadSplit make_workload(std::span<const uint64_t> keys, WorkloadKind kind,
                            double fraction_or_count, uint64_t seed) {
    if (keys.empty()) throw std::invalid_argument("make_workload: empty keys");
    std::mt19937_64 rng(seed);
    WorkloadSplit split;
    split.workload.kind = kind;

    if (kind == WorkloadKind::kLowerBoundAbsent) {
        if (fraction_or_count <= 0.0 || fraction_or_count >= 1.0)
            throw std::invalid_argument("make_workload: fraction must be in (0,1)");
        const uint64_t target =
            std::max<uint64_t>(1, std::llround(fraction_or_count * keys.size()));

        std::vector<uint64_t> positions(keys.size());
        std::iota(positions.begin(), positions.end(), uint64_t(0));
        std::shuffle(positions.begin(), positions.end(), rng);

        std::unordered_set<uint64_t> removed;
        removed.reserve(target * 2);
        for (uint64_t i = 0; i < target && i < keys.size(); ++i) {
            if (removed.insert(keys[positions[i]]).second)
                split.workload.queries.push_back(keys[positions[i]]);
        }
        split.indexed_keys.reserve(keys.size() - target);
        for (uint64_t k : keys)
            if (!removed.contains(k)) split.indexed_keys.push_back(k);
        if (split.indexed_keys.empty())
            throw std::invalid_argument("make_workload: removal fraction leaves no keys");
        std::shuffle(split.workload.queries.begin(), split.workload.queries.end(), rng);
    } else {
        const uint64_t count = std::llround(fraction_or_count);
        if (count < 1) throw std::invalid_argument("make_workload: query count must be >= 1");
        split.indexed_keys.assign(keys.begin(), keys.end());
        std::uniform_int_distribution<uint64_t> pick(0, keys.size() - 1);
        split.workload.queries.resize(count);
        for (auto& q : split.workload.queries) q = keys[pick(rng)];
    }

    split.workload.expected =
        expected_folds(split.indexed_keys, split.workload.queries, kind);
    return split;
}

} // namespace lsi
