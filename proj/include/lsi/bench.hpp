#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lsi/datagen.hpp"
#include "lsi/lsi.hpp"

namespace lsi {

enum class IndexKind { kLsi, kSortedPairs, kRobinHash };

const char* index_name(IndexKind k);
IndexKind index_from_name(const std::string& name);
const char* model_name(ModelKind k);
ModelKind model_from_name(const std::string& name);
const char* workload_name(WorkloadKind k);

struct BenchConfig {
    DatasetSpec dataset;
    std::string sosd_path;     // when non-empty, keys come from this file
    IndexKind index = IndexKind::kLsi;
    ModelKind model = ModelKind::kSpline;
    std::vector<uint64_t> epsilons = {8};
    std::vector<unsigned> fp_widths = {0};
    WorkloadKind workload = WorkloadKind::kLowerBoundAbsent;
    uint64_t query_count = 100'000;
    unsigned repetitions = 3;
    bool validate = false;
    double remove_fraction = 0.1; // share of keys removed for absent lookups
};

//! One CSV row. Baselines report component bytes as zero and their whole
//! footprint under total_bytes.
struct BenchReport {
    std::string dataset;
    std::string index;
    std::string model;
    uint64_t epsilon = 0;
    unsigned width = 0;
    double build_seconds = 0.0;
    uint64_t model_bytes = 0;
    uint64_t permutation_bytes = 0;
    uint64_t fingerprint_bytes = 0;
    uint64_t total_bytes = 0;
    double mean_ns = 0.0;
    double p50_ns = 0.0;
    double p99_ns = 0.0;
    uint64_t checksum = 0;
};

inline constexpr const char* kCsvHeader =
    "dataset,index,model,epsilon,width,build_seconds,model_bytes,permutation_bytes,"
    "fingerprint_bytes,total_bytes,mean_ns,p50_ns,p99_ns,checksum";

//! Builds every configured (epsilon, width) variant of the chosen index over
//! the dataset, validates against the oracle when asked, and measures the
//! workload single-threaded: one warm-up pass, then `repetitions` timed
//! passes whose lookups are chained through the running checksum so neither
//! the compiler nor the CPU can overlap or elide them.
std::vector<BenchReport> run(const BenchConfig& config);

void emit_csv(std::span<const BenchReport> reports, std::ostream& out);
void emit_csv(std::span<const BenchReport> reports, const std::string& path);

} // namespace lsi
