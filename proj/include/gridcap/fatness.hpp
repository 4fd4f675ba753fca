#pragma once

// Uniform p-fatness: capacity-density ratios
//
//   ratio(x, r) = cap_p(B(x,r) ∩ E, B(x,2r)) / cap_p(B(x,r), B(x,2r))
//
// scanned over centers x in E and dyadic radii.  Both condensers live in the
// ambient grid (E is typically the domain complement).  The set is deemed
// fat at the tested scales when the scan infimum stays bounded away from 0
// across refinements; verdicts belong to the trend layer.

#include "capacity.hpp"
#include "trend.hpp"

namespace gridcap {

struct FatnessRow {
    Point center{0, 0, 0};
    double radius = 0;
    double ratio = 0;
    bool thin = false; // B(x,r) ∩ E rasterized empty at this scale
};

struct FatnessScan {
    double p = 2;
    std::vector<FatnessRow> rows; // sorted by (center order, radius)
    double c0_est = 0;            // min ratio over rows
    bool any_thin = false;
};

// Single capacity-density ratio at center x and radius r.  Requires
// B(x, 2r) to fit inside the grid so the outer condenser is not clipped.
inline FatnessRow fatness_ratio(const MetricGrid& g, const SetMask& E, const Point& x,
                                double r, double p) {
    if (!(r > 0)) throw std::invalid_argument("radius must be positive");
    for (int a = 0; a < g.params.Q; ++a)
        if (x[a] - 2 * r < g.params.bbox.lo[a] || x[a] + 2 * r > g.params.bbox.hi[a])
            throw std::invalid_argument("ball exceeds bounding box");

    FatnessRow row;
    row.center = x;
    row.radius = r;

    SetMask env = ball_mask(g, x, 2 * r);
    SetMask plate_full = ball_mask(g, x, r);

    std::vector<int64_t> cells;
    for (int64_t idx : plate_full.cells)
        if (E.contains(idx)) cells.push_back(idx);
    if (cells.empty()) {
        row.thin = true;
        row.ratio = 0;
        return row;
    }
    SetMask plate_e{std::move(cells)};

    CapacityProblem num;
    num.grid = &g;
    num.plate = std::move(plate_e);
    num.env = env;
    num.p = p;
    CapacityProblem den;
    den.grid = &g;
    den.plate = std::move(plate_full);
    den.env = std::move(env);
    den.p = p;

    double cap_num = solve_capacity(num).value;
    double cap_den = solve_capacity(den).value;
    row.ratio = cap_den > 0 ? cap_num / cap_den : 0;
    return row;
}

// Scan over farthest-point-sampled centers of E and dyadic radii
// r = r_min * 2^k.  Radii start at 4h (below that a ball is a handful of
// cells and the ratio is rasterization noise) and stay within a quarter of
// the box side; per center, radii whose doubled ball leaves the grid are
// skipped.
inline FatnessScan fatness_scan(const MetricGrid& g, const SetMask& E, double p,
                                int64_t center_count, int radius_levels) {
    if (center_count < 1) throw std::invalid_argument("need at least one center");
    if (radius_levels < 1) throw std::invalid_argument("need at least one radius level");
    if (E.size() == 0) throw std::runtime_error("empty mask: fatness target");

    const double r_min = 4.0 * g.params.h;
    const double r_cap = 0.25 * g.params.bbox.min_side(g.params.Q);

    // candidate centers must admit at least the smallest ball pair; masks of
    // domain complements otherwise drown the sample in bbox-frame cells
    std::vector<Point> pts;
    pts.reserve(E.cells.size());
    for (int64_t idx : E.cells) {
        Point x = g.cell_center(idx);
        double fit = std::numeric_limits<double>::infinity();
        for (int a = 0; a < g.params.Q; ++a) {
            fit = std::min(fit, x[a] - g.params.bbox.lo[a]);
            fit = std::min(fit, g.params.bbox.hi[a] - x[a]);
        }
        if (2 * r_min <= fit) pts.push_back(x);
    }
    if (pts.empty())
        throw std::runtime_error("no admissible radius: grid too coarse for a scan");
    auto chosen = farthest_point_sample(pts, g.params.Q, center_count);

    FatnessScan scan;
    scan.p = p;
    scan.c0_est = std::numeric_limits<double>::infinity();
    for (int64_t ci : chosen) {
        const Point& x = pts[ci];
        double fit = std::numeric_limits<double>::infinity();
        for (int a = 0; a < g.params.Q; ++a) {
            fit = std::min(fit, x[a] - g.params.bbox.lo[a]);
            fit = std::min(fit, g.params.bbox.hi[a] - x[a]);
        }
        for (int k = 0; k < radius_levels; ++k) {
            double r = r_min * std::ldexp(1.0, k);
            if (r > r_cap || 2 * r > fit) break;
            FatnessRow row = fatness_ratio(g, E, x, r, p);
            scan.any_thin = scan.any_thin || row.thin;
            scan.c0_est = std::min(scan.c0_est, row.ratio);
            scan.rows.push_back(row);
        }
    }
    if (scan.rows.empty())
        throw std::runtime_error("no admissible radius: grid too coarse for a scan");
    return scan;
}

// Upper bound on the perfectness annulus gap of E implied by a fatness
// floor c0: if E had a gap of factor m at some scale r, the logarithmic
// cutoff between the scales r/m and r would make the capacity density
// smaller than c0 unless
//
//   m <= exp((C_upper * C_lower / c0)^(1/p)),
//
// with C_upper the cutoff-energy constant (log_cutoff_upper_bound at unit
// gap) and C_lower the reciprocal normalized ball capacity.  Only the range
// p < Q carries information (the cutoff energy degenerates otherwise).
struct FatnessPerfectnessBound {
    double m_max = 0;
    double c_upper = 0;
    double c_lower = 0;
    double c0 = 0;
    double p = 0;
    int Q = 0;
};

inline FatnessPerfectnessBound fatness_to_perfectness_bound(double c0, double p, int Q) {
    if (!(p < double(Q))) throw std::runtime_error("annulus gap bound requires p < Q");
    if (!(p > 1)) throw std::invalid_argument("exponent must exceed 1");
    if (!(c0 > 0 && c0 <= 1.0 + 1e-9))
        throw std::invalid_argument("fatness floor must lie in (0, 1]");
    FatnessPerfectnessBound b;
    b.c0 = c0;
    b.p = p;
    b.Q = Q;
    // energy of the log cutoff over one e-fold, normalized to r = 1
    b.c_upper = sphere_area_constant(Q) / (double(Q) - p);
    b.c_lower = 1.0 / radial_condenser_capacity(1.0, 2.0, p, Q);
    b.m_max = std::exp(std::pow(b.c_upper * b.c_lower / c0, 1.0 / p));
    return b;
}

} // namespace gridcap
