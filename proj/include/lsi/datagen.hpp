#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lsi {

enum class Family {
    kUniformDense,
    kUniformSparse,
    kLognormalMapped,
    kClustered,
    kTimestampsWithDuplicates,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

//! Synthetic dataset description. duplicate_fraction d in [0,1) shrinks the
//! distinct-key pool to n - round(d*n); the remaining positions repeat pool
//! keys, so distinct/total lands at 1-d. Generation is a pure function of
//! the spec.
struct DatasetSpec {
    Family family = Family::kUniformSparse;
    uint64_t n = 10'000'000; // desk-scale default
    uint64_t seed = 42;
    double duplicate_fraction = 0.0;
};

//! Keys in random base order.
std::vector<uint64_t> generate(const DatasetSpec& spec);

// SOSD binary format: u64-LE key count, then count u64-LE keys.
std::vector<uint64_t> read_sosd(const std::string& path);
void write_sosd(const std::string& path, std::span<const uint64_t> keys);

enum class WorkloadKind { kLowerBoundAbsent, kEqualityPresent };

//! Queries plus per-query oracle fold values (lower-bound: base position + 1,
//! 0 when past the maximum key; equality: wrapping sum of position + 1 over
//! all matches). Folds are what the bench checksums, so validation can
//! compare without re-deriving structure.
struct Workload {
    WorkloadKind kind = WorkloadKind::kLowerBoundAbsent;
    std::vector<uint64_t> queries;
    std::vector<uint64_t> expected;
};

struct WorkloadSplit {
    std::vector<uint64_t> indexed_keys;
    Workload workload;
};

//! kLowerBoundAbsent: removes a random fraction of the keys (every copy of a
//! removed value, so the queries are strictly absent) and returns the removed
//! values, shuffled, as queries. kEqualityPresent: samples `fraction_or_count`
//! positions with replacement as queries; indexed keys unchanged.
WorkloadSplit make_workload(std::span<const uint64_t> keys, WorkloadKind kind,
                            double fraction_or_count, uint64_t seed);

} // namespace lsi
