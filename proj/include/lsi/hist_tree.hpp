#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "lsi/cdf.hpp"

namespace lsi {

//! Read-only radix tree with fixed fanout 2^fanout_bits. Every node keeps a
//! cumulative rank histogram over its child bins; a bin holding at most
//! max_error keys (or a single distinct key, however long its duplicate run)
//! is terminal, otherwise a child node consumes the next fanout_bits of the
//! min-normalized key.
class HistTreeModel {
  public:
    static constexpr uint32_t kNoChild = std::numeric_limits<uint32_t>::max();

    HistTreeModel() = default;

    static HistTreeModel build(std::span<const CdfPoint> cdf, uint64_t n, uint64_t max_error,
                               unsigned fanout_bits = 8) {
        if (cdf.empty() || n == 0) throw std::invalid_argument("HistTreeModel: empty cdf");
        if (max_error < 1) throw std::invalid_argument("HistTreeModel: max_error must be >= 1");
        if (fanout_bits < 1 || fanout_bits > 16)
            throw std::invalid_argument("HistTreeModel: fanout_bits must be in [1,16]");
        if (n > std::numeric_limits<uint32_t>::max() - 1)
            throw std::invalid_argument("HistTreeModel: key count exceeds 32-bit rank space");

        HistTreeModel m;
        m.fanout_bits_ = fanout_bits;
        m.max_error_ = max_error;
        m.key_min_ = cdf.front().key;
        m.key_max_ = cdf.back().key;
        m.n_ = n;
        const unsigned span_bits = std::bit_width(m.key_max_ - m.key_min_);
        m.root_shift_ = span_bits > fanout_bits ? span_bits - fanout_bits : 0;
        m.build_node(cdf, 0, cdf.size(), n, m.root_shift_);
        return m;
    }

    RankRange lookup_range(uint64_t q) const {
        if (q < key_min_) return {0, 0, false};
        if (q > key_max_) return {n_ - 1, n_ - 1, true};
        const uint64_t nq = q - key_min_;
        const uint64_t fanout = uint64_t(1) << fanout_bits_;
        uint32_t node = 0;
        unsigned shift = root_shift_;
        for (;;) {
            const uint64_t j = (nq >> shift) & (fanout - 1);
            const uint32_t child = children_[node * fanout + j];
            if (child == kNoChild) {
                const uint64_t lo = ranks_[node * (fanout + 1) + j];
                const uint64_t hi = ranks_[node * (fanout + 1) + j + 1];
                return {std::min(lo, n_ - 1), std::min(hi, n_ - 1), false};
            }
            node = child;
            shift = shift >= fanout_bits_ ? shift - fanout_bits_ : 0;
        }
    }

    size_t size_bytes() const {
        return ranks_.size() * sizeof(uint32_t) + children_.size() * sizeof(uint32_t);
    }

    //! Calls fn(start_rank, end_rank) for every terminal bin.
    template <typename Fn>
    void for_each_terminal(Fn&& fn) const {
        const uint64_t fanout = uint64_t(1) << fanout_bits_;
        for (uint64_t node = 0; node < node_count_; ++node)
            for (uint64_t j = 0; j < fanout; ++j)
                if (children_[node * fanout + j] == kNoChild)
                    fn(uint64_t(ranks_[node * (fanout + 1) + j]),
                       uint64_t(ranks_[node * (fanout + 1) + j + 1]));
    }

    unsigned fanout_bits() const { return fanout_bits_; }
    uint64_t max_error() const { return max_error_; }
    uint64_t key_min() const { return key_min_; }
    uint64_t key_max() const { return key_max_; }
    uint64_t n() const { return n_; }
    uint64_t node_count() const { return node_count_; }

    uint64_t depth() const { return depth_of(0, root_shift_); }

  private:
    uint64_t depth_of(uint32_t node, unsigned shift) const {
        const uint64_t fanout = uint64_t(1) << fanout_bits_;
        uint64_t d = 1;
        for (uint64_t j = 0; j < fanout; ++j) {
            const uint32_t c = children_[node * fanout + j];
            if (c != kNoChild)
                d = std::max(d, 1 + depth_of(c, shift >= fanout_bits_ ? shift - fanout_bits_ : 0));
        }
        return d;
    }

    uint32_t build_node(std::span<const CdfPoint> cdf, size_t first, size_t last,
                        uint64_t end_rank, unsigned shift) {
        const uint64_t fanout = uint64_t(1) << fanout_bits_;
        const uint32_t node = static_cast<uint32_t>(node_count_++);
        ranks_.resize(ranks_.size() + fanout + 1);
        children_.resize(children_.size() + fanout, kNoChild);

        std::vector<size_t> bin_first(fanout + 1);
        size_t i = first;
        for (uint64_t j = 0; j < fanout; ++j) {
            bin_first[j] = i;
            ranks_[node * (fanout + 1) + j] =
                static_cast<uint32_t>(i < last ? cdf[i].rank : end_rank);
            while (i < last && (((cdf[i].key - key_min_) >> shift) & (fanout - 1)) == j) ++i;
        }
        bin_first[fanout] = last;
        ranks_[node * (fanout + 1) + fanout] = static_cast<uint32_t>(end_rank);

        for (uint64_t j = 0; j < fanout; ++j) {
            const size_t bf = bin_first[j], bl = bin_first[j + 1];
            const uint64_t bin_end_rank = bl < last ? cdf[bl].rank : end_rank;
            const uint64_t count = bin_end_rank - (bf < last ? cdf[bf].rank : end_rank);
            const bool single_key = bl - bf <= 1;
            if (count > max_error_ && !single_key && shift > 0) {
                const uint32_t child =
                    build_node(cdf, bf, bl, bin_end_rank,
                               shift >= fanout_bits_ ? shift - fanout_bits_ : 0);
                children_[node * fanout + j] = child;
            }
        }
        return node;
    }

    std::vector<uint32_t> ranks_;
    std::vector<uint32_t> children_;
    uint64_t node_count_ = 0;
    unsigned fanout_bits_ = 8;
    unsigned root_shift_ = 0;
    uint64_t max_error_ = 0;
    uint64_t key_min_ = 0;
    uint64_t key_max_ = 0;
    uint64_t n_ = 0;
};

} // namespace lsi
