#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsi {

//! One point of the key CDF: a distinct key and the sorted rank of its
//! first occurrence. Duplicate runs collapse to a single point.
struct CdfPoint {
    uint64_t key;
    uint64_t rank;

    friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

//! Inclusive rank interval returned by the approximate indexes. When
//! `beyond_max` is set the query exceeded the largest key and the interval
//! is the degenerate [n-1, n-1].
struct RankRange {
    uint64_t lo = 0;
    uint64_t hi = 0;
    bool beyond_max = false;

    uint64_t width() const { return hi - lo + 1; }
};

inline std::vector<CdfPoint> build_cdf(std::span<const uint64_t> sorted_keys) {
    if (sorted_keys.empty()) throw std::invalid_argument("build_cdf: empty input");
    std::vector<CdfPoint> cdf;
    for (size_t i = 0; i < sorted_keys.size(); ++i) {
        if (i > 0 && sorted_keys[i] < sorted_keys[i - 1])
            throw std::logic_error("build_cdf: input not sorted");
        if (i == 0 || sorted_keys[i] != sorted_keys[i - 1])
            cdf.push_back({sorted_keys[i], i});
    }
    return cdf;
}

} // namespace lsi
