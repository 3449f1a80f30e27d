#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>

#include "lsi/packed_array.hpp"

namespace lsi {

//! Bits per entry for a permutation over n elements: ceil(log2(n)), with
//! the degenerate n <= 1 case pinned to one bit.
inline unsigned permutation_entry_width(uint64_t n) {
    if (n <= 1) return 1;
    return std::bit_width(n - 1);
}

//! n * ceil(log2(n)) — the payload bits of the bit-packed representation.
inline uint64_t packed_size_bits(uint64_t n) {
    if (n == 0) throw std::invalid_argument("packed_size_bits: n must be >= 1");
    return n * permutation_entry_width(n);
}

//! log2(n!), the information-theoretic bits needed to store a permutation
//! of n elements. lgamma keeps this O(1) and well inside 1e-6 relative error.
inline double theoretic_bound_bits(uint64_t n) {
    if (n == 0) throw std::invalid_argument("theoretic_bound_bits: n must be >= 1");
    return std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2;
}

//! Maps sorted rank -> position in the unsorted base array, packed at
//! ceil(log2(n)) bits per entry. Immutable once built.
class PermutationVector {
  public:
    PermutationVector() = default;

    //! Packs `values`, which must be a permutation of {0,...,n-1}.
    explicit PermutationVector(std::span<const uint64_t> values)
        : n_(values.size()), bits_(values.size(), permutation_entry_width(values.size())) {
        if (values.empty()) throw std::invalid_argument("empty dataset");
        for (size_t i = 0; i < n_; ++i) bits_.set(i, values[i]);
    }

    uint64_t get(uint64_t i) const {
        if (i >= n_) throw std::out_of_range("PermutationVector::get: rank out of range");
        return bits_.get(i);
    }

    uint64_t size() const { return n_; }
    unsigned width() const { return bits_.width(); }
    size_t size_bytes() const { return bits_.size_bytes(); }
    std::span<const uint64_t> words() const { return bits_.words(); }

  private:
    uint64_t n_ = 0;
    PackedArray bits_;
};

//! Stable argsort of `keys`: result p satisfies keys[p[0]] <= ... <= keys[p[n-1]],
//! equal keys keeping ascending base order.
inline PermutationVector build_permutation(std::span<const uint64_t> keys) {
    if (keys.empty()) throw std::invalid_argument("empty dataset");
    std::vector<uint64_t> order(keys.size());
    std::iota(order.begin(), order.end(), uint64_t(0));
    std::sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) {
        return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
    });
    return PermutationVector(order);
}

} // namespace lsi
