#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "lsi/cdf.hpp"
#include "lsi/fingerprint.hpp"
#include "lsi/hist_tree.hpp"
#include "lsi/permutation.hpp"
#include "lsi/spline_model.hpp"

namespace lsi {

enum class ModelKind { kSpline, kHistTree };

//! Per-lookup instrumentation. Zero-cost when not requested.
struct LookupStats {
    uint64_t base_accesses = 0;
    uint64_t perm_accesses = 0;
    uint64_t fingerprint_probes = 0;
    uint64_t fingerprint_false_positives = 0;

    LookupStats& operator+=(const LookupStats& o) {
        base_accesses += o.base_accesses;
        perm_accesses += o.perm_accesses;
        fingerprint_probes += o.fingerprint_probes;
        fingerprint_false_positives += o.fingerprint_false_positives;
        return *this;
    }
};

struct LowerBoundResult {
    uint64_t base_index;
    uint64_t rank;

    friend bool operator==(const LowerBoundResult&, const LowerBoundResult&) = default;
};

struct SizeBreakdown {
    size_t model_bytes = 0;
    size_t permutation_bytes = 0;
    size_t fingerprint_bytes = 0;
    size_t total_bytes = 0;
};

//! Learned secondary index over a borrowed, unsorted key array: an
//! error-bounded model over the key CDF, a bit-packed permutation from
//! sorted rank to base position, and an optional fingerprint vector for
//! equality pruning. The base array is referenced, never copied; it must
//! outlive the index.
class Lsi {
  public:
    Lsi() = default;

    static Lsi build(std::span<const uint64_t> base, uint64_t max_error,
                     unsigned fingerprint_width, ModelKind kind) {
        if (base.empty()) throw std::invalid_argument("empty dataset");
        if (max_error < 1) throw std::invalid_argument("Lsi: max_error must be >= 1");
        if (!fingerprint_width_supported(fingerprint_width))
            throw std::invalid_argument("unsupported fingerprint width");

        const uint64_t n = base.size();
        Lsi out;
        out.base_ = base;
        out.max_error_ = max_error;
        out.fp_width_ = fingerprint_width;

        // sorted copy of (key, base position); ties keep ascending position
        std::vector<std::pair<uint64_t, uint64_t>> sorted(n);
        for (uint64_t i = 0; i < n; ++i) sorted[i] = {base[i], i};
        std::sort(sorted.begin(), sorted.end());

        std::vector<uint64_t> sorted_keys(n);
        for (uint64_t i = 0; i < n; ++i) sorted_keys[i] = sorted[i].first;
        const std::vector<CdfPoint> cdf = build_cdf(sorted_keys);

        if (kind == ModelKind::kSpline)
            out.model_ = SplineModel::build(cdf, n, max_error);
        else
            out.model_ = HistTreeModel::build(cdf, n, max_error);

        std::vector<uint64_t> order(n);
        for (uint64_t i = 0; i < n; ++i) order[i] = sorted[i].second;
        out.perm_ = PermutationVector(order);

        out.fingerprints_ = FingerprintVector(n, fingerprint_width);
        if (fingerprint_width > 0)
            for (uint64_t i = 0; i < n; ++i)
                out.fingerprints_.set(i, fingerprint_of(sorted_keys[i], fingerprint_width));

        // sorted copy, cdf and order go out of scope here; only the packed
        // structures are retained
        return out;
    }

    RankRange model_range(uint64_t q) const {
        return std::visit([q](const auto& m) { return m.lookup_range(q); }, model_);
    }

    //! Smallest key >= q: its base position and sorted rank, or nothing when
    //! q exceeds the maximum key. Among duplicates, the first-occurrence rank
    //! (smallest base position).
    std::optional<LowerBoundResult> lower_bound(uint64_t q, LookupStats* stats = nullptr) const {
        const RankRange r = model_range(q);
        if (r.beyond_max) return std::nullopt;
        const uint64_t rank = search_geq(q, r.lo, r.hi, stats);
        assert(rank <= r.hi);
        if (stats) ++stats->perm_accesses;
        return LowerBoundResult{perm_.get(rank), rank};
    }

    //! All base positions holding exactly q, in ascending rank order.
    std::vector<uint64_t> equality(uint64_t q, LookupStats* stats = nullptr) const {
        std::vector<uint64_t> out;
        equality_into(q, out, stats);
        return out;
    }

    //! equality() into a caller-owned buffer (cleared first); avoids
    //! per-lookup allocation in measurement loops.
    void equality_into(uint64_t q, std::vector<uint64_t>& out, LookupStats* stats = nullptr) const {
        out.clear();
        const RankRange r = model_range(q);
        if (r.beyond_max) return;
        const uint64_t n = base_.size();

        if (fp_width_ == 0) {
            // no fingerprints: binary search, then walk the duplicate run
            uint64_t rank = search_geq(q, r.lo, r.hi, stats);
            for (; rank < n; ++rank) {
                if (stats) {
                    ++stats->perm_accesses;
                    ++stats->base_accesses;
                }
                const uint64_t bi = perm_.get(rank);
                if (base_[bi] != q) break;
                out.push_back(bi);
            }
            return;
        }

        // linear scan over the fingerprint vector; verified matches are
        // rank-contiguous, so after the first hit the scan may run past hi
        // and stops at the first non-matching fragment
        const uint64_t frag = fingerprint_of(q, fp_width_);
        bool found = false;
        for (uint64_t rank = r.lo; rank < n; ++rank) {
            if (stats) ++stats->fingerprint_probes;
            if (fingerprints_.matches(rank, frag)) {
                if (stats) {
                    ++stats->perm_accesses;
                    ++stats->base_accesses;
                }
                const uint64_t bi = perm_.get(rank);
                if (base_[bi] == q) {
                    out.push_back(bi);
                    found = true;
                } else if (stats) {
                    ++stats->fingerprint_false_positives;
                }
            } else if (found) {
                break;
            }
            if (!found && rank >= r.hi) break;
        }
    }

    SizeBreakdown size_breakdown() const {
        SizeBreakdown s;
        s.model_bytes = std::visit([](const auto& m) { return m.size_bytes(); }, model_);
        s.permutation_bytes = perm_.size_bytes();
        s.fingerprint_bytes = fingerprints_.size_bytes();
        s.total_bytes = s.model_bytes + s.permutation_bytes + s.fingerprint_bytes;
        return s;
    }

    uint64_t size() const { return base_.size(); }
    uint64_t max_error() const { return max_error_; }
    unsigned fingerprint_width() const { return fp_width_; }
    std::span<const uint64_t> base() const { return base_; }
    const PermutationVector& perm() const { return perm_; }
    const FingerprintVector& fingerprints() const { return fingerprints_; }
    ModelKind model_kind() const {
        return std::holds_alternative<SplineModel>(model_) ? ModelKind::kSpline
                                                           : ModelKind::kHistTree;
    }
    const SplineModel& spline() const { return std::get<SplineModel>(model_); }
    const HistTreeModel& hist_tree() const { return std::get<HistTreeModel>(model_); }

  private:
    // first rank in [lo, hi] whose key is >= q; every probe is a random
    // access into the unsorted base
    uint64_t search_geq(uint64_t q, uint64_t lo, uint64_t hi, LookupStats* stats) const {
        uint64_t len = hi - lo + 1;
        while (len > 0) {
            const uint64_t half = len / 2;
            const uint64_t mid = lo + half;
            if (stats) {
                ++stats->perm_accesses;
                ++stats->base_accesses;
            }
            if (base_[perm_.get(mid)] < q) {
                lo = mid + 1;
                len -= half + 1;
            } else {
                len = half;
            }
        }
        return lo;
    }

    std::span<const uint64_t> base_;
    std::variant<SplineModel, HistTreeModel> model_;
    PermutationVector perm_;
    FingerprintVector fingerprints_;
    uint64_t max_error_ = 0;
    unsigned fp_width_ = 0;
};

} // namespace lsi
