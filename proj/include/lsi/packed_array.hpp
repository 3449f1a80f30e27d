#pragma once

#include <cassert>
#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

namespace lsi {

//! Fixed-width bit-packed integer array with O(1) random access.
//! Entries may straddle word boundaries; a read touches at most two words.
//! One slack word is kept at the end so the second fetch is always in range.
class PackedArray {
  public:
    PackedArray() = default;

    PackedArray(size_t n, unsigned width)
        : n_(n), width_(width),
          mask_(width >= 64 ? ~uint64_t(0) : (uint64_t(1) << width) - 1),
          words_(payload_words(n, width) + 1, 0) {
        assert(width >= 1 && width <= 64);
    }

    void set(size_t i, uint64_t v) {
        assert(i < n_);
        assert((v & ~mask_) == 0);
        const size_t bit = i * width_;
        const size_t w = bit >> 6;
        const unsigned off = bit & 63;
        words_[w] = (words_[w] & ~(mask_ << off)) | (v << off);
        if (off + width_ > 64) {
            const unsigned spill = off + width_ - 64;
            const uint64_t hi_mask = (uint64_t(1) << spill) - 1;
            words_[w + 1] = (words_[w + 1] & ~hi_mask) | (v >> (64 - off));
        }
    }

    uint64_t get(size_t i) const {
        assert(i < n_);
        const size_t bit = i * width_;
        const size_t w = bit >> 6;
        const unsigned off = bit & 63;
        uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        return v & mask_;
    }

    size_t size() const { return n_; }
    unsigned width() const { return width_; }
    bool empty() const { return n_ == 0; }

    //! Payload bytes: n*width bits rounded up to whole 64-bit words.
    //! The slack word is an access guard, not payload.
    size_t size_bytes() const { return payload_words(n_, width_) * sizeof(uint64_t); }

    std::span<const uint64_t> words() const { return words_; }

  private:
    static size_t payload_words(size_t n, unsigned width) {
        // ceil(n*width / 64); n*width stays below 2^64 for any feasible n
        return (n * width + 63) >> 6;
    }

    size_t n_ = 0;
    unsigned width_ = 0;
    uint64_t mask_ = 0;
    std::vector<uint64_t> words_;
};

} // namespace lsi
