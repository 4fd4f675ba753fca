#pragma once

// Uniform perfectness of finite point sets and cell masks.
//
// A set is c-uniformly perfect when no annulus B(x, c*r) \ B(x, r) centered
// in the set separates it (unless nothing remains beyond the annulus).  For
// a finite set the smallest admissible constant is exactly the largest ratio
// of consecutive distinct distances from a member point to the rest of the
// set.  Two adaptations make this meaningful at desk scale:
//
//  * bounded fixtures: the final distance gap per center is excluded — the
//    modeled set continues beyond the sampled window, so the jump to the
//    farthest sample is a truncation artifact (drop_final_gap);
//  * cell masks: the cell side h is prepended as the innermost scale, so a
//    far-isolated single cell shows up as an enormous gap h -> d_1 instead
//    of being invisible (include_atom).

#include "grid.hpp"

#include <cmath>

namespace gridcap {

struct PerfectnessOptions {
    bool include_atom = false;  // prepend `atom` as the innermost distance
    double atom = 0;
    bool drop_final_gap = true; // bounded-fixture adaptation
    double dedup_tol = 0;       // absolute tolerance when deduplicating distances
    int64_t max_centers = 0;    // 0 = every point; else farthest-point subsample
};

struct GapRow {
    Point center{0, 0, 0};
    double r_low = 0;  // inner radius of the worst empty annulus at this center
    double r_high = 0; // next occupied distance
    double ratio = 1;  // r_high / r_low
};

struct PerfectnessReport {
    double c_up_est = 1;
    GapRow witness;           // the gap achieving c_up_est
    std::vector<GapRow> rows; // one row per examined center
};

inline PerfectnessReport perfectness_constant(const std::vector<Point>& pts, int Q,
                                              const PerfectnessOptions& opt = {}) {
    if (pts.size() < 2)
        throw std::runtime_error("uniform perfectness undefined for singletons");

    std::vector<int64_t> centers;
    if (opt.max_centers > 0 && (int64_t)pts.size() > opt.max_centers) {
        centers = farthest_point_sample(pts, Q, opt.max_centers);
        std::sort(centers.begin(), centers.end());
    } else {
        centers.resize(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) centers[i] = (int64_t)i;
    }

    PerfectnessReport rep;
    std::vector<double> d;
    d.reserve(pts.size() + 1);
    for (int64_t ci : centers) {
        const Point& x = pts[ci];
        d.clear();
        if (opt.include_atom && opt.atom > 0) d.push_back(opt.atom);
        for (size_t j = 0; j < pts.size(); ++j) {
            if ((int64_t)j == ci) continue;
            double dj = dist_q(x, pts[j], Q);
            if (dj > opt.dedup_tol) d.push_back(dj);
        }
        std::sort(d.begin(), d.end());
        size_t m = 0;
        for (size_t k = 0; k < d.size(); ++k)
            if (m == 0 || d[k] - d[m - 1] > opt.dedup_tol) d[m++] = d[k];
        d.resize(m);

        size_t last_ratio = m >= 2 ? m - 1 : 0; // ratio index k means d[k]/d[k-1]
        if (opt.drop_final_gap && last_ratio > 0) --last_ratio;

        GapRow row;
        row.center = x;
        for (size_t k = 1; k <= last_ratio; ++k) {
            double ratio = d[k] / d[k - 1];
            if (ratio > row.ratio) {
                row.ratio = ratio;
                row.r_low = d[k - 1];
                row.r_high = d[k];
            }
        }
        rep.rows.push_back(row);
        if (row.ratio > rep.c_up_est) {
            rep.c_up_est = row.ratio;
            rep.witness = row;
        }
    }
    if (rep.witness.r_low == 0) { // every center degenerate: no gap beats 1
        rep.witness.center = pts[centers[0]];
    }
    return rep;
}

// Mask overload: cell centers as the point set, cell side as the atom scale.
inline PerfectnessReport perfectness_constant(const MetricGrid& g, const SetMask& mask,
                                              PerfectnessOptions opt = {}) {
    std::vector<Point> pts;
    pts.reserve(mask.cells.size());
    for (int64_t idx : mask.cells) pts.push_back(g.cell_center(idx));
    if (!opt.include_atom) {
        opt.include_atom = true;
        opt.atom = g.params.h;
    }
    if (opt.dedup_tol == 0) opt.dedup_tol = g.params.h * 1e-6;
    return perfectness_constant(pts, g.params.Q, opt);
}

// Sharpness threshold: below this perfectness constant, uniform p-fatness is
// guaranteed.  Only meaningful in the window max{Q - log2/log3, 1} < p < Q.
inline double sharp_threshold(double p, int Q) {
    double lo = std::max(double(Q) - std::log(2.0) / std::log(3.0), 1.0);
    if (!(p > lo && p < double(Q)))
        throw std::runtime_error("outside admissible exponent window");
    return std::pow(2.0, 1.0 / (double(Q) - p)) - 2.0;
}

// Perfectness constant implied by a Hardy constant:
//   c_up <= 4 exp(2^(Q+1) c_H c_A / c),  c = 1/(4^Q c_A log 2).
// The exponent routinely overflows double (Q=2, c_A=pi, c_H=1 gives
// exp(128 pi^2 log2)), so the log of the bound is returned alongside the
// possibly-infinite value; comparisons should use log_value.
struct PerfectnessBound {
    double value = 0;
    double log_value = 0;
};

inline PerfectnessBound hardy_perfectness_constant(double c_H, double c_A, int Q) {
    if (!(c_H > 0 && c_A > 0)) throw std::invalid_argument("constants must be positive");
    if (Q != 2 && Q != 3) throw std::invalid_argument("ambient dimension must be 2 or 3");
    double c = 1.0 / (std::pow(4.0, Q) * c_A * std::log(2.0));
    double exponent = std::pow(2.0, Q + 1) * c_H * c_A / c;
    PerfectnessBound b;
    b.log_value = std::log(4.0) + exponent;
    b.value = std::exp(b.log_value); // may overflow to +inf; log_value is exact
    return b;
}

} // namespace gridcap
