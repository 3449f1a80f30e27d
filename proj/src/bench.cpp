#include "lsi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lsi/baselines.hpp"

namespace lsi {

const char* index_name(IndexKind k) {
    switch (k) {
        case IndexKind::kLsi: return "lsi";
        case IndexKind::kSortedPairs: return "sorted_pairs";
        case IndexKind::kRobinHash: return "robin_hash";
    }
    return "unknown";
}

IndexKind index_from_name(const std::string& name) {
    if (name == "lsi") return IndexKind::kLsi;
    if (name == "sorted_pairs") return IndexKind::kSortedPairs;
    if (name == "robin_hash") return IndexKind::kRobinHash;
    throw std::invalid_argument("unknown index kind: " + name);
}

const char* model_name(ModelKind k) {
    return k == ModelKind::kSpline ? "spline" : "cht";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "spline") return ModelKind::kSpline;
    if (name == "cht") return ModelKind::kHistTree;
    throw std::invalid_argument("unknown model kind: " + name);
}

const char* workload_name(WorkloadKind k) {
    return k == WorkloadKind::kLowerBoundAbsent ? "lower_bound" : "equality";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// A zero the optimizer cannot prove to be zero. ANDing the running checksum
// with it yields a value that is always 0 yet data-depends on the previous
// lookup, so XORing it into the next query key serializes the loop without
// changing any key.
uint64_t opaque_zero() {
    uint64_t z = 0;
    asm volatile("" : "+r"(z));
    return z;
}

struct Timing {
    double mean_ns = 0.0;
    double p50_ns = 0.0;
    double p99_ns = 0.0;
    uint64_t checksum = 0;
};

// One warm-up pass, then `reps` recorded passes. Per-lookup durations are
// sampled on a 1-in-64 stride; full-rate clock reads would swamp lookups
// that take a few hundred nanoseconds.
template <typename Lookup>
Timing measure(std::span<const uint64_t> queries, unsigned reps, Lookup&& lookup) {
    const uint64_t zero_mask = opaque_zero();
    Timing t;
    std::vector<double> samples;
    double total_ns = 0.0;
    uint64_t total_lookups = 0;

    for (unsigned rep = 0; rep <= reps; ++rep) {
        const bool record = rep > 0;
        uint64_t checksum = 0;
        const auto t0 = Clock::now();
        for (size_t i = 0; i < queries.size(); ++i) {
            const uint64_t q = queries[i] ^ (checksum & zero_mask);
            const bool sampled = record && (i & 63) == 0;
            Clock::time_point s0;
            if (sampled) s0 = Clock::now();
            checksum += lookup(q);
            if (sampled)
                samples.push_back(
                    std::chrono::duration<double, std::nano>(Clock::now() - s0).count());
        }
        const double ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
        if (record) {
            total_ns += ns;
            total_lookups += queries.size();
            if (rep == 1) {
                t.checksum = checksum;
            } else if (checksum != t.checksum) {
                throw std::runtime_error("bench: checksum diverged across repetitions");
            }
        } else {
            t.checksum = checksum;
        }
    }

    t.mean_ns = total_lookups ? total_ns / static_cast<double>(total_lookups) : 0.0;
    if (!samples.empty()) {
        auto nth = [&](double frac) {
            const size_t k = std::min(samples.size() - 1,
                                      static_cast<size_t>(frac * (samples.size() - 1)));
            std::nth_element(samples.begin(), samples.begin() + k, samples.end());
            return samples[k];
        };
        t.p50_ns = nth(0.50);
        t.p99_ns = nth(0.99);
    }
    return t;
}

// naive reference answers, independent of any index structure
struct Oracle {
    std::vector<std::pair<uint64_t, uint64_t>> sorted;

    explicit Oracle(std::span<const uint64_t> keys) : sorted(keys.size()) {
        for (uint64_t i = 0; i < keys.size(); ++i) sorted[i] = {keys[i], i};
        std::sort(sorted.begin(), sorted.end());
    }

    std::optional<LowerBoundResult> lower_bound(uint64_t q) const {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), q,
                                   [](const auto& p, uint64_t v) { return p.first < v; });
        if (it == sorted.end()) return std::nullopt;
        return LowerBoundResult{it->second, static_cast<uint64_t>(it - sorted.begin())};
    }

    std::vector<uint64_t> equality(uint64_t q) const {
        std::vector<uint64_t> out;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), q,
                                   [](const auto& p, uint64_t v) { return p.first < v; });
        for (; it != sorted.end() && it->first == q; ++it) out.push_back(it->second);
        return out;
    }
};

uint64_t fold_lower_bound(const std::optional<LowerBoundResult>& r) {
    return r ? r->base_index + 1 : 0;
}

uint64_t fold_equality(std::span<const uint64_t> indices) {
    uint64_t sum = 0;
    for (uint64_t i : indices) sum += i + 1;
    return sum;
}

template <typename LowerBoundFn, typename EqualityFn>
void validate_index(const BenchConfig& config, const Workload& workload, const Oracle& oracle,
                    LowerBoundFn&& lb, EqualityFn&& eq) {
    for (size_t i = 0; i < workload.queries.size(); ++i) {
        const uint64_t q = workload.queries[i];
        if (config.workload == WorkloadKind::kLowerBoundAbsent) {
            const auto got = lb(q);
            const auto want = oracle.lower_bound(q);
            if (got != want)
                throw std::runtime_error("bench: validation mismatch on lower_bound query " +
                                         std::to_string(q));
        } else {
            auto got = eq(q);
            auto want = oracle.equality(q);
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            if (got != want)
                throw std::runtime_error("bench: validation mismatch on equality query " +
                                         std::to_string(q));
        }
    }
}

std::string dataset_label(const BenchConfig& config) {
    if (!config.sosd_path.empty()) return "sosd:" + config.sosd_path;
    return family_name(config.dataset.family);
}

} // namespace

std::vector<BenchReport> run(const BenchConfig& config) {
    if (config.repetitions < 1)
        throw std::invalid_argument("bench: repetitions must be >= 1");
    if (config.query_count < 1) throw std::invalid_argument("bench: query_count must be >= 1");
    if (config.index == IndexKind::kRobinHash &&
        config.workload == WorkloadKind::kLowerBoundAbsent)
        throw std::invalid_argument("bench: robin_hash does not support lower-bound lookups");
    for (uint64_t e : config.epsilons)
        if (e < 1) throw std::invalid_argument("bench: epsilon must be >= 1");
    for (unsigned w : config.fp_widths)
        if (!fingerprint_width_supported(w))
            throw std::invalid_argument("bench: unsupported fingerprint width");

    const std::vector<uint64_t> keys =
        config.sosd_path.empty() ? generate(config.dataset) : read_sosd(config.sosd_path);

    const uint64_t workload_seed = config.dataset.seed * 0x9e3779b97f4a7c15ULL + 1;
    WorkloadSplit split =
        make_workload(keys, config.workload,
                      config.workload == WorkloadKind::kLowerBoundAbsent
                          ? config.remove_fraction
                          : static_cast<double>(config.query_count),
                      workload_seed);

    // cycle the removed keys up to the requested query count
    std::vector<uint64_t> queries(config.query_count);
    if (split.workload.queries.empty()) throw std::runtime_error("bench: empty workload");
    for (uint64_t i = 0; i < config.query_count; ++i)
        queries[i] = split.workload.queries[i % split.workload.queries.size()];

    const std::span<const uint64_t> indexed = split.indexed_keys;
    Oracle oracle(indexed);

    std::vector<BenchReport> reports;
    const std::string label = dataset_label(config);

    auto base_report = [&](uint64_t eps, unsigned width, const char* model) {
        BenchReport r;
        r.dataset = label;
        r.index = index_name(config.index);
        r.model = model;
        r.epsilon = eps;
        r.width = width;
        return r;
    };

    switch (config.index) {
        case IndexKind::kLsi: {
            for (uint64_t eps : config.epsilons) {
                for (unsigned width : config.fp_widths) {
                    BenchReport r = base_report(eps, width, model_name(config.model));
                    const auto t0 = Clock::now();
                    const Lsi idx = Lsi::build(indexed, eps, width, config.model);
                    r.build_seconds = seconds_since(t0);
                    const SizeBreakdown s = idx.size_breakdown();
                    r.model_bytes = s.model_bytes;
                    r.permutation_bytes = s.permutation_bytes;
                    r.fingerprint_bytes = s.fingerprint_bytes;
                    r.total_bytes = s.total_bytes;

                    if (config.validate)
                        validate_index(
                            config, split.workload, oracle,
                            [&](uint64_t q) { return idx.lower_bound(q); },
                            [&](uint64_t q) { return idx.equality(q); });

                    Timing t;
                    if (config.workload == WorkloadKind::kLowerBoundAbsent) {
                        t = measure(queries, config.repetitions, [&](uint64_t q) {
                            return fold_lower_bound(idx.lower_bound(q));
                        });
                    } else {
                        std::vector<uint64_t> scratch;
                        scratch.reserve(64);
                        t = measure(queries, config.repetitions, [&](uint64_t q) {
                            idx.equality_into(q, scratch);
                            return fold_equality(scratch);
                        });
                    }
                    r.mean_ns = t.mean_ns;
                    r.p50_ns = t.p50_ns;
                    r.p99_ns = t.p99_ns;
                    r.checksum = t.checksum;
                    reports.push_back(std::move(r));
                }
            }
            break;
        }
        case IndexKind::kSortedPairs: {
            BenchReport r = base_report(0, 0, "none");
            const auto t0 = Clock::now();
            const SortedPairsIndex idx = SortedPairsIndex::build(indexed);
            r.build_seconds = seconds_since(t0);
            r.total_bytes = idx.size_bytes();

            if (config.validate)
                validate_index(
                    config, split.workload, oracle,
                    [&](uint64_t q) { return idx.lower_bound(q); },
                    [&](uint64_t q) { return idx.equality(q); });

            Timing t;
            if (config.workload == WorkloadKind::kLowerBoundAbsent) {
                t = measure(queries, config.repetitions, [&](uint64_t q) {
                    return fold_lower_bound(idx.lower_bound(q));
                });
            } else {
                std::vector<uint64_t> scratch;
                scratch.reserve(64);
                t = measure(queries, config.repetitions, [&](uint64_t q) {
                    idx.equality_into(q, scratch);
                    return fold_equality(scratch);
                });
            }
            r.mean_ns = t.mean_ns;
            r.p50_ns = t.p50_ns;
            r.p99_ns = t.p99_ns;
            r.checksum = t.checksum;
            reports.push_back(std::move(r));
            break;
        }
        case IndexKind::kRobinHash: {
            BenchReport r = base_report(0, 0, "none");
            const auto t0 = Clock::now();
            const RobinHoodTable idx = RobinHoodTable::build(indexed);
            r.build_seconds = seconds_since(t0);
            r.total_bytes = idx.size_bytes();

            if (config.validate)
                validate_index(
                    config, split.workload, oracle,
                    [&](uint64_t) -> std::optional<LowerBoundResult> { return std::nullopt; },
                    [&](uint64_t q) { return idx.equality(q); });

            std::vector<uint64_t> scratch;
            scratch.reserve(64);
            Timing t = measure(queries, config.repetitions, [&](uint64_t q) {
                idx.equality_into(q, scratch);
                return fold_equality(scratch);
            });
            r.mean_ns = t.mean_ns;
            r.p50_ns = t.p50_ns;
            r.p99_ns = t.p99_ns;
            r.checksum = t.checksum;
            reports.push_back(std::move(r));
            break;
        }
    }
    return reports;
}

void emit_csv(std::span<const BenchReport> reports, std::ostream& out) {
    if (reports.empty()) throw std::invalid_argument("emit_csv: no reports");
    out << kCsvHeader << '\n';
    char line[512];
    for (const BenchReport& r : reports) {
        std::snprintf(line, sizeof(line),
                      "%s,%s,%s,%llu,%u,%.6f,%llu,%llu,%llu,%llu,%.2f,%.2f,%.2f,%llu",
                      r.dataset.c_str(), r.index.c_str(), r.model.c_str(),
                      static_cast<unsigned long long>(r.epsilon), r.width, r.build_seconds,
                      static_cast<unsigned long long>(r.model_bytes),
                      static_cast<unsigned long long>(r.permutation_bytes),
                      static_cast<unsigned long long>(r.fingerprint_bytes),
                      static_cast<unsigned long long>(r.total_bytes), r.mean_ns, r.p50_ns,
                      r.p99_ns, static_cast<unsigned long long>(r.checksum));
        out << line << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failure");
}

void emit_csv(std::span<const BenchReport> reports, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(reports, static_cast<std::ostream&>(out));
}

} // namespace lsi
