#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "lsi/packed_array.hpp"
#include "lsi/permutation.hpp"

namespace lsi {

inline constexpr std::array<unsigned, 6> kFingerprintWidths = {0, 1, 2, 4, 8, 16};

inline bool fingerprint_width_supported(unsigned width) {
    for (unsigned w : kFingerprintWidths)
        if (w == width) return true;
    return false;
}

//! Murmur3 64-bit finalizer (fmix64).
inline uint64_t fmix64(uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

//! Top `width` bits of fmix64(key); width 0 yields the empty fragment 0.
inline uint64_t fingerprint_of(uint64_t key, unsigned width) {
    if (!fingerprint_width_supported(width))
        throw std::invalid_argument("unsupported fingerprint width");
    if (width == 0) return 0;
    return fmix64(key) >> (64 - width);
}

//! One hash fragment per sorted rank, packed at exactly `width` bits each.
//! Width 0 disables fingerprinting: no storage, every query matches.
class FingerprintVector {
  public:
    FingerprintVector() = default;

    FingerprintVector(uint64_t n, unsigned width)
        : n_(n), width_(width), bits_(width == 0 ? PackedArray{} : PackedArray(n, width)) {
        if (!fingerprint_width_supported(width))
            throw std::invalid_argument("unsupported fingerprint width");
    }

    void set(uint64_t i, uint64_t fragment) {
        if (width_ != 0) bits_.set(i, fragment);
    }

    bool matches(uint64_t i, uint64_t fragment) const {
        if (i >= n_) throw std::out_of_range("FingerprintVector::matches: rank out of range");
        if (width_ == 0) return true;
        return bits_.get(i) == fragment;
    }

    uint64_t get(uint64_t i) const {
        if (i >= n_) throw std::out_of_range("FingerprintVector::get: rank out of range");
        return width_ == 0 ? 0 : bits_.get(i);
    }

    uint64_t size() const { return n_; }
    unsigned width() const { return width_; }
    size_t size_bytes() const { return width_ == 0 ? 0 : bits_.size_bytes(); }
    std::span<const uint64_t> words() const { return bits_.words(); }

  private:
    uint64_t n_ = 0;
    unsigned width_ = 0;
    PackedArray bits_;
};

//! Fragment at entry i is fingerprint_of(keys[p.get(i)], width): sorted-rank
//! order, so equality scans walk the vector sequentially.
inline FingerprintVector build_fingerprints(std::span<const uint64_t> keys,
                                            const PermutationVector& p, unsigned width) {
    FingerprintVector fv(p.size(), width);
    if (width == 0) return fv;
    for (uint64_t i = 0; i < p.size(); ++i) fv.set(i, fingerprint_of(keys[p.get(i)], width));
    return fv;
}

} // namespace lsi
