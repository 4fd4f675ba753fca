#pragma once

// Joint verdict matrix for one domain: the four quantitatively linked
// conditions — Hardy inequality, uniform perfectness of the complement,
// uniform fatness at the conformal exponent, and fatness slightly below
// it — each evaluated over a refinement ladder, plus the explicit constants
// that tie the conditions to each other.

#include "fatness.hpp"
#include "hardy.hpp"
#include "perfectness.hpp"
#include "trend.hpp"

#include <string>

namespace gridcap {

struct EquivalenceOptions {
    int refinements = 3;           // ladder length, h halved per level
    int fatness_centers = 6;
    int fatness_radius_levels = 4;
    int64_t perfectness_centers = 48;
    std::vector<double> fatness_eps{0.1, 0.25}; // subconformal probes p = Q - eps
    HardyOptions hardy;
};

struct EquivalenceCondition {
    std::string name;
    double p = 0;
    std::vector<double> hs;     // ladder of cell sides
    std::vector<double> values; // the condition's scalar per level
    Trend trend = Trend::Stable;
    bool positive = false;
};

struct EquivalenceCrossBounds {
    double hardy_constant = 0;        // finest-level estimate
    double perfectness_bound_log = 0; // log of the gap bound implied by it
    // per subconformal probe: sharpness threshold (NaN outside its window)
    std::vector<double> sharp_thresholds;
    // per subconformal probe: gap bound implied by the scanned fatness floor
    std::vector<double> gap_bounds;
};

struct EquivalenceMatrix {
    int Q = 2;
    EquivalenceCondition hardy;
    EquivalenceCondition perfectness;
    EquivalenceCondition fatness_conformal;
    std::vector<EquivalenceCondition> fatness_subconformal;
    EquivalenceCrossBounds bounds;
    bool all_positive = false;
    bool converged = true; // solver convergence across all levels
};

inline EquivalenceMatrix run_equivalence(const MetricGrid& coarse,
                                         const EquivalenceOptions& opt = {}) {
    if (opt.refinements < 2)
        throw std::invalid_argument("need at least two refinement levels for a trend");
    const int Q = coarse.params.Q;

    EquivalenceMatrix mat;
    mat.Q = Q;

    std::vector<MetricGrid> ladder;
    ladder.push_back(coarse);
    for (int k = 1; k < opt.refinements; ++k)
        ladder.push_back(refine(ladder.back()));

    // condition 1: Hardy inequality at p = Q
    auto est = estimate_hardy_constant(coarse, double(Q), opt.refinements, opt.hardy);
    mat.hardy.name = "hardy";
    mat.hardy.p = double(Q);
    for (const auto& lv : est.levels) {
        mat.hardy.hs.push_back(lv.h);
        mat.hardy.values.push_back(lv.c_h_est);
        mat.converged = mat.converged && lv.converged;
    }
    mat.hardy.trend = est.trend;
    mat.hardy.positive = est.holds;

    // condition 2: uniform perfectness of the complement
    mat.perfectness.name = "perfectness";
    mat.perfectness.p = 0;
    PerfectnessOptions popt;
    popt.max_centers = opt.perfectness_centers;
    for (const auto& g : ladder) {
        auto rep = perfectness_constant(g, complement_mask(g), popt);
        mat.perfectness.hs.push_back(g.params.h);
        mat.perfectness.values.push_back(rep.c_up_est);
    }
    mat.perfectness.trend = classify_trend(mat.perfectness.values);
    mat.perfectness.positive = mat.perfectness.trend != Trend::Diverging;

    // conditions 3 and 4: fatness at p = Q and p = Q - eps.  The dyadic
    // radius ladder starts at 4h, so it must be extended as h shrinks to
    // keep probing the same coarse physical scales; with a fixed level
    // count the scan is self-similar in cell units and a thin set would
    // never register as vanishing.
    auto fatness_condition = [&](double p, const std::string& name) {
        EquivalenceCondition cond;
        cond.name = name;
        cond.p = p;
        for (const auto& g : ladder) {
            const double r_cap = 0.25 * g.params.bbox.min_side(Q);
            int levels = opt.fatness_radius_levels;
            double top = 4.0 * g.params.h * std::ldexp(1.0, levels - 1);
            while (top * 2.0 <= r_cap) {
                top *= 2.0;
                ++levels;
            }
            auto scan = fatness_scan(g, complement_mask(g), p, opt.fatness_centers, levels);
            cond.hs.push_back(g.params.h);
            cond.values.push_back(scan.c0_est);
        }
        cond.trend = classify_trend(cond.values);
        cond.positive = cond.trend != Trend::Vanishing;
        return cond;
    };
    mat.fatness_conformal = fatness_condition(double(Q), "fatness");
    for (double eps : opt.fatness_eps)
        mat.fatness_subconformal.push_back(
            fatness_condition(double(Q) - eps, "fatness-subconformal"));

    // cross bounds between the conditions
    mat.bounds.hardy_constant = mat.hardy.values.back();
    mat.bounds.perfectness_bound_log =
        hardy_perfectness_constant(mat.bounds.hardy_constant, coarse.params.c_A, Q)
            .log_value;
    for (size_t k = 0; k < opt.fatness_eps.size(); ++k) {
        double p = double(Q) - opt.fatness_eps[k];
        double thr = std::numeric_limits<double>::quiet_NaN();
        try {
            thr = sharp_threshold(p, Q);
        } catch (const std::runtime_error&) {
        }
        mat.bounds.sharp_thresholds.push_back(thr);
        double c0 = mat.fatness_subconformal[k].values.back();
        double gap = std::numeric_limits<double>::quiet_NaN();
        if (c0 > 0) gap = fatness_to_perfectness_bound(c0, p, Q).m_max;
        mat.bounds.gap_bounds.push_back(gap);
    }

    mat.all_positive = mat.hardy.positive && mat.perfectness.positive &&
                       mat.fatness_conformal.positive;
    for (const auto& c : mat.fatness_subconformal)
        mat.all_positive = mat.all_positive && c.positive;
    return mat;
}

} // namespace gridcap
