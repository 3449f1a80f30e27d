#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lsi/cdf.hpp"

namespace lsi {

namespace detail {

// sign of (a.dy/a.dx - b.dy/b.dx) with dx > 0; exact in 128-bit
inline int slope_cmp(int64_t ady, uint64_t adx, int64_t bdy, uint64_t bdx) {
    const __int128 l = static_cast<__int128>(ady) * static_cast<__int128>(bdx);
    const __int128 r = static_cast<__int128>(bdy) * static_cast<__int128>(adx);
    return l < r ? -1 : (l > r ? 1 : 0);
}

//! Corridor constraint points: the CDF points themselves plus, after every
//! duplicate run longer than one, the point (key+1, rank_after_run). The
//! extra points pin the spline to the top of each CDF step so that
//! predictions for keys falling inside the gap after a run stay within
//! max_error of the run's end. Without them an absent query landing there
//! could be mispredicted by up to the run length.
inline std::vector<CdfPoint> corridor_points(std::span<const CdfPoint> cdf) {
    std::vector<CdfPoint> pts;
    pts.reserve(cdf.size());
    for (size_t i = 0; i < cdf.size(); ++i) {
        pts.push_back(cdf[i]);
        if (i + 1 < cdf.size()) {
            const uint64_t run = cdf[i + 1].rank - cdf[i].rank;
            if (run > 1 && cdf[i].key + 1 < cdf[i + 1].key)
                pts.push_back({cdf[i].key + 1, cdf[i + 1].rank});
        }
    }
    return pts;
}

} // namespace detail

//! Greedy one-pass corridor fit. Keeps upper/lower slope limits from the
//! last emitted knot; a point that falls outside the corridor makes the
//! previous point a knot and restarts the corridor from there. Linear
//! interpolation through the result stays within max_error of every CDF
//! point. First and last CDF points are always knots.
inline std::vector<CdfPoint> fit_spline(std::span<const CdfPoint> cdf, uint64_t max_error) {
    if (max_error < 1) throw std::invalid_argument("fit_spline: max_error must be >= 1");
    if (cdf.empty()) throw std::invalid_argument("fit_spline: empty cdf");

    const std::vector<CdfPoint> pts = detail::corridor_points(cdf);
    std::vector<CdfPoint> knots{pts.front()};
    if (pts.size() == 1) return knots;

    const int64_t eps = static_cast<int64_t>(max_error);
    size_t base = 0;
    bool have_corridor = false;
    int64_t up_dy = 0, lo_dy = 0;
    uint64_t up_dx = 1, lo_dx = 1;

    for (size_t i = 1; i < pts.size(); ++i) {
        uint64_t dx = pts[i].key - pts[base].key;
        int64_t dy = static_cast<int64_t>(pts[i].rank) - static_cast<int64_t>(pts[base].rank);

        if (have_corridor &&
            (detail::slope_cmp(dy, dx, lo_dy, lo_dx) < 0 ||
             detail::slope_cmp(dy, dx, up_dy, up_dx) > 0)) {
            knots.push_back(pts[i - 1]);
            base = i - 1;
            have_corridor = false;
            dx = pts[i].key - pts[base].key;
            dy = static_cast<int64_t>(pts[i].rank) - static_cast<int64_t>(pts[base].rank);
        }

        if (!have_corridor) {
            up_dy = dy + eps;
            lo_dy = dy - eps;
            up_dx = lo_dx = dx;
            have_corridor = true;
        } else {
            if (detail::slope_cmp(dy + eps, dx, up_dy, up_dx) < 0) {
                up_dy = dy + eps;
                up_dx = dx;
            }
            if (detail::slope_cmp(dy - eps, dx, lo_dy, lo_dx) > 0) {
                lo_dy = dy - eps;
                lo_dx = dx;
            }
        }
    }
    if (knots.back().key != pts.back().key) knots.push_back(pts.back());
    return knots;
}

//! Error-bounded spline over the key CDF with a radix table over the
//! top bits of min-normalized keys to narrow the knot search.
class SplineModel {
  public:
    SplineModel() = default;

    static SplineModel build(std::span<const CdfPoint> cdf, uint64_t n, uint64_t max_error) {
        if (cdf.empty() || n == 0) throw std::invalid_argument("SplineModel: empty cdf");
        SplineModel m;
        m.knots_ = fit_spline(cdf, max_error);
        m.max_error_ = max_error;
        m.key_min_ = cdf.front().key;
        m.key_max_ = cdf.back().key;
        m.n_ = n;

        const uint64_t knot_count = m.knots_.size();
        const unsigned ceil_log2 = knot_count <= 1 ? 0 : std::bit_width(knot_count - 1);
        m.radix_bits_ = std::min(18u, ceil_log2 + 2);
        const unsigned span_bits = std::bit_width(m.key_max_ - m.key_min_);
        m.prefix_shift_ = span_bits > m.radix_bits_ ? span_bits - m.radix_bits_ : 0;

        m.radix_table_.assign((uint64_t(1) << m.radix_bits_) + 1, 0);
        uint64_t idx = 0;
        for (uint64_t b = 0; b < m.radix_table_.size(); ++b) {
            while (idx < knot_count && m.radix_prefix(m.knots_[idx].key) < b) ++idx;
            m.radix_table_[b] = idx;
        }
        return m;
    }

    uint64_t radix_prefix(uint64_t key) const { return (key - key_min_) >> prefix_shift_; }

    //! Interpolated rank for q in [key_min, key_max], rounded to nearest.
    uint64_t predict(uint64_t q) const {
        assert(q >= key_min_ && q <= key_max_);
        if (knots_.size() == 1) return knots_.front().rank;

        const uint64_t b = radix_prefix(q);
        const auto first = knots_.begin() + static_cast<ptrdiff_t>(radix_table_[b]);
        const auto last = knots_.begin() + static_cast<ptrdiff_t>(radix_table_[b + 1]);
        auto it = std::upper_bound(first, last, q,
                                   [](uint64_t v, const CdfPoint& p) { return v < p.key; });
        if (it == knots_.end()) return knots_.back().rank; // q == key_max
        assert(it != knots_.begin());
        const CdfPoint& k1 = *(it - 1);
        const CdfPoint& k2 = *it;
        const long double t = static_cast<long double>(q - k1.key) /
                              static_cast<long double>(k2.key - k1.key);
        const long double pred = static_cast<long double>(k1.rank) +
                                 t * static_cast<long double>(k2.rank - k1.rank);
        return static_cast<uint64_t>(llroundl(pred));
    }

    //! Rank interval guaranteed to contain the lower-bound rank of q.
    RankRange lookup_range(uint64_t q) const {
        if (q < key_min_) return {0, 0, false};
        if (q > key_max_) return {n_ - 1, n_ - 1, true};
        const uint64_t pred = predict(q);
        const uint64_t lo = pred > max_error_ ? pred - max_error_ : 0;
        const uint64_t hi = std::min(pred + max_error_ + 1, n_ - 1);
        return {lo, hi, false};
    }

    // 16 bytes per knot plus 8 per radix-table entry
    size_t size_bytes() const {
        return knots_.size() * sizeof(CdfPoint) + radix_table_.size() * sizeof(uint64_t);
    }

    std::span<const CdfPoint> knots() const { return knots_; }
    std::span<const uint64_t> radix_table() const { return radix_table_; }
    unsigned radix_bits() const { return radix_bits_; }
    uint64_t max_error() const { return max_error_; }
    uint64_t key_min() const { return key_min_; }
    uint64_t key_max() const { return key_max_; }
    uint64_t n() const { return n_; }

  private:
    std::vector<CdfPoint> knots_;
    std::vector<uint64_t> radix_table_;
    uint64_t max_error_ = 0;
    unsigned radix_bits_ = 0;
    unsigned prefix_shift_ = 0;
    uint64_t key_min_ = 0;
    uint64_t key_max_ = 0;
    uint64_t n_ = 0;
};

} // namespace lsi
