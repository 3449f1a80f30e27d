#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsi/fingerprint.hpp"
#include "lsi/lsi.hpp"

namespace lsi {

//! Sorted (key, base position) pairs — the leaf layer of a traditional
//! secondary index, and the structural baseline for space comparisons.
class SortedPairsIndex {
  public:
    static SortedPairsIndex build(std::span<const uint64_t> base) {
        if (base.empty()) throw std::invalid_argument("empty dataset");
        SortedPairsIndex idx;
        idx.pairs_.resize(base.size());
        for (uint64_t i = 0; i < base.size(); ++i) idx.pairs_[i] = {base[i], i};
        std::sort(idx.pairs_.begin(), idx.pairs_.end());
        return idx;
    }

    std::optional<LowerBoundResult> lower_bound(uint64_t q) const {
        auto it = std::lower_bound(pairs_.begin(), pairs_.end(), q,
                                   [](const auto& p, uint64_t v) { return p.first < v; });
        if (it == pairs_.end()) return std::nullopt;
        return LowerBoundResult{it->second, static_cast<uint64_t>(it - pairs_.begin())};
    }

    std::vector<uint64_t> equality(uint64_t q) const {
        std::vector<uint64_t> out;
        equality_into(q, out);
        return out;
    }

    void equality_into(uint64_t q, std::vector<uint64_t>& out) const {
        out.clear();
        auto it = std::lower_bound(pairs_.begin(), pairs_.end(), q,
                                   [](const auto& p, uint64_t v) { return p.first < v; });
        for (; it != pairs_.end() && it->first == q; ++it) out.push_back(it->second);
    }

    size_t size_bytes() const { return pairs_.size() * sizeof(std::pair<uint64_t, uint64_t>); }
    std::span<const std::pair<uint64_t, uint64_t>> pairs() const { return pairs_; }

  private:
    std::vector<std::pair<uint64_t, uint64_t>> pairs_;
};

//! Robin-hood open-addressing table mapping key -> base position, duplicates
//! stored as separate slots. Build-once, no tombstones; equality only.
class RobinHoodTable {
  public:
    static RobinHoodTable build(std::span<const uint64_t> base) {
        if (base.empty()) throw std::invalid_argument("empty dataset");
        RobinHoodTable t;
        uint64_t cap = 16;
        while (base.size() * 4 > cap * 3) cap <<= 1; // load factor <= 0.75
        t.slots_.resize(cap);
        t.dist_.assign(cap, -1);
        t.mask_ = cap - 1;
        for (uint64_t i = 0; i < base.size(); ++i) t.insert(base[i], i);
        return t;
    }

    std::vector<uint64_t> equality(uint64_t q) const {
        std::vector<uint64_t> out;
        equality_into(q, out);
        return out;
    }

    void equality_into(uint64_t q, std::vector<uint64_t>& out) const {
        out.clear();
        uint64_t i = fmix64(q) & mask_;
        for (int16_t d = 0; dist_[i] >= d; i = (i + 1) & mask_, ++d)
            if (slots_[i].key == q) out.push_back(slots_[i].value);
    }

    size_t size_bytes() const {
        return slots_.size() * sizeof(Slot) + dist_.size() * sizeof(int16_t);
    }
    uint64_t capacity() const { return slots_.size(); }
    uint64_t size() const { return size_; }

    //! Probe-sequence-length of the occupied slot at table position i,
    //! or -1 when empty. Exposed for invariant checks.
    int16_t probe_length_at(uint64_t i) const { return dist_.at(i); }
    uint64_t home_of(uint64_t key) const { return fmix64(key) & mask_; }
    uint64_t key_at(uint64_t i) const { return slots_.at(i).key; }

  private:
    struct Slot {
        uint64_t key = 0;
        uint64_t value = 0;
    };

    void insert(uint64_t key, uint64_t value) {
        Slot cur{key, value};
        uint64_t i = fmix64(key) & mask_;
        int16_t d = 0;
        for (;;) {
            if (dist_[i] < 0) {
                slots_[i] = cur;
                dist_[i] = d;
                ++size_;
                return;
            }
            if (dist_[i] < d) {
                std::swap(cur, slots_[i]);
                std::swap(d, dist_[i]);
            }
            i = (i + 1) & mask_;
            ++d;
            assert(d < std::numeric_limits<int16_t>::max());
        }
    }

    std::vector<Slot> slots_;
    std::vector<int16_t> dist_;
    uint64_t mask_ = 0;
    uint64_t size_ = 0;
};

} // namespace lsi
