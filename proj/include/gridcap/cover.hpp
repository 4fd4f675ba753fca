#pragma once

// Ball covers, the cover-merging procedure with its certificates, and
// greedy upper / certified lower bounds for Hausdorff s-content.
//
// A cover is a finite list of open balls centered at points of a target
// set, covering all of it.  Merging repeatedly replaces a "close" pair
// (the first ball's c_UP-dilate meets the second, radii within a factor
// alpha) by a single ball; the exponent condition eps < log2/log(alpha*
// c_UP + 2) guarantees the cost sum  r_i^eps never increases, which is
// what turns merged covers into content lower bounds.

#include "geometry.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace gridcap {

struct Ball {
    Point center{0, 0, 0};
    double radius = 0;
};

struct BallCover {
    std::vector<Ball> balls;
    std::vector<Point> target; // points that must remain covered
    double exponent = 0;       // eps used for the cost sum
};

struct MergeParams {
    double alpha = 2.0; // radius-comparability factor, > 1
    double c_up = 1.0;  // dilation factor (perfectness constant), >= 1
    double eps = 0;     // cost exponent, in (0, epsilon_threshold(alpha*c_up))
};

// Largest admissible cost exponent for merge constant C.
inline double epsilon_threshold(double C) {
    if (!(C > 0)) throw std::invalid_argument("merge constant must be positive");
    return std::log(2.0) / std::log(C + 2.0);
}

// a^eps + b^eps >= (a + b + C*min{a,b})^eps  (equality counts as holding)
inline bool merge_inequality_holds(double a, double b, double C, double eps) {
    if (!(a > 0 && b > 0)) throw std::invalid_argument("lengths must be positive");
    return std::pow(a, eps) + std::pow(b, eps) >=
           std::pow(a + b + C * std::min(a, b), eps);
}

inline double cover_cost(const BallCover& c) {
    double s = 0;
    for (const auto& b : c.balls) s += std::pow(b.radius, c.exponent);
    return s;
}

inline bool covers_target(const BallCover& c, int Q) {
    for (const auto& p : c.target) {
        bool hit = false;
        for (const auto& b : c.balls)
            if (dist_q(p, b.center, Q) < b.radius) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

struct MergeStep {
    int64_t step = 0;      // 1-based
    int64_t i = 0, j = 0;  // pre-merge indices of the merged pair
    double new_radius = 0;
    double cost_after = 0; // sum r^eps after this step
};

struct MergeOutcome {
    BallCover cover;
    std::vector<MergeStep> steps;
};

namespace detail {

inline void validate_merge_params(const MergeParams& mp) {
    if (!(mp.alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
    if (!(mp.c_up >= 1.0)) throw std::invalid_argument("c_up must be at least 1");
    double C = mp.alpha * mp.c_up;
    if (!(mp.eps > 0) || !(mp.eps < epsilon_threshold(C)))
        throw std::runtime_error("exponent above merge threshold");
}

// Ordered pair (i,j) is mergeable when r_i <= alpha*r_j and the c_UP-dilate
// of ball i meets ball j.
inline bool mergeable(const Ball& bi, const Ball& bj, const MergeParams& mp, int Q) {
    return bi.radius <= mp.alpha * bj.radius &&
           dist_q(bi.center, bj.center, Q) < mp.c_up * bi.radius + bj.radius;
}

} // namespace detail

// Runs the merge loop to stability.  Deterministic pair order: smallest
// combined index i+j first, then smaller min(i,j), then smaller i.  The
// merged ball keeps the larger ball's center (lower index on ties), replaces
// slot min(i,j), and slot max(i,j) is erased.  Each step re-checks the two
// certificates (cost non-increase, coverage).
inline MergeOutcome merge_cover(BallCover cover, const MergeParams& mp, int Q) {
    detail::validate_merge_params(mp);
    for (const auto& b : cover.balls)
        if (!(b.radius > 0)) throw std::invalid_argument("ball radii must be positive");
    if (cover.balls.empty()) throw std::invalid_argument("cover must contain a ball");
    if (!covers_target(cover, Q)) throw std::runtime_error("cover leaves target uncovered");

    MergeOutcome out;
    const int64_t initial = (int64_t)cover.balls.size();
    const double C = mp.alpha * mp.c_up;
    double cost = cover_cost(cover);

    for (int64_t step = 1; step <= initial - 1; ++step) {
        const int64_t n = (int64_t)cover.balls.size();
        int64_t best_i = -1, best_j = -1;
        auto better = [](int64_t i1, int64_t j1, int64_t i2, int64_t j2) {
            auto key = [](int64_t i, int64_t j) {
                return std::array<int64_t, 3>{i + j, std::min(i, j), i};
            };
            return key(i1, j1) < key(i2, j2);
        };
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!detail::mergeable(cover.balls[i], cover.balls[j], mp, Q)) continue;
                if (best_i < 0 || better(i, j, best_i, best_j)) {
                    best_i = i;
                    best_j = j;
                }
            }
        if (best_i < 0) break;

        const Ball bi = cover.balls[best_i];
        const Ball bj = cover.balls[best_j];
        if (!merge_inequality_holds(bi.radius, bj.radius, C, mp.eps))
            throw std::logic_error("merge certificate violated");

        Ball merged;
        merged.radius = bi.radius + bj.radius + C * std::min(bi.radius, bj.radius);
        if (bi.radius > bj.radius)
            merged.center = bi.center;
        else if (bj.radius > bi.radius)
            merged.center = bj.center;
        else
            merged.center = best_i < best_j ? bi.center : bj.center;

        int64_t keep = std::min(best_i, best_j), drop = std::max(best_i, best_j);
        cover.balls[keep] = merged;
        cover.balls.erase(cover.balls.begin() + drop);

        double new_cost = cover_cost(cover);
        if (new_cost > cost * (1.0 + 1e-12))
            throw std::logic_error("merge certificate violated");
        if (!covers_target(cover, Q))
            throw std::logic_error("merge lost coverage");
        cost = new_cost;
        out.steps.push_back({step, best_i, best_j, merged.radius, new_cost});
    }
    out.cover = std::move(cover);
    return out;
}

struct SurvivalReport {
    double radius = 0; // radius of the ball containing x0
    double bound = 0;  // (alpha-1) r0 / (alpha (c_up+1))
    bool pass = false;
    std::vector<Ball> chain; // diagnostic: geometrically shrinking dilate chain
};

// Lower bound on the radius of the merged ball containing x0.  The chain
// diagnostic walks: next ball has radius <= current/alpha and meets the
// current ball's c_UP-dilate.
inline SurvivalReport surviving_radius_bound(const BallCover& cover, const Point& x0,
                                             double r0, const MergeParams& mp, int Q) {
    detail::validate_merge_params(mp);
    if (!(r0 > 0)) throw std::invalid_argument("r0 must be positive");

    int64_t first = -1;
    const int64_t n = (int64_t)cover.balls.size();
    for (int64_t i = 0; i < n; ++i)
        if (dist_q(x0, cover.balls[i].center, Q) < cover.balls[i].radius) {
            first = i;
            break;
        }
    if (first < 0) throw std::runtime_error("cover does not cover x0");

    SurvivalReport rep;
    rep.radius = cover.balls[first].radius;
    rep.bound = (mp.alpha - 1.0) * r0 / (mp.alpha * (mp.c_up + 1.0));
    rep.pass = rep.radius >= rep.bound * (1.0 - 1e-12);

    std::vector<char> used(n, 0);
    int64_t cur = first;
    used[cur] = 1;
    rep.chain.push_back(cover.balls[cur]);
    for (int64_t guard = 0; guard < n; ++guard) {
        int64_t next = -1;
        for (int64_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            const Ball& bc = cover.balls[cur];
            const Ball& bn = cover.balls[j];
            if (bn.radius <= bc.radius / mp.alpha &&
                dist_q(bc.center, bn.center, Q) < mp.c_up * bc.radius + bn.radius) {
                next = j;
                break;
            }
        }
        if (next < 0) break;
        used[next] = 1;
        rep.chain.push_back(cover.balls[next]);
        cur = next;
    }
    return rep;
}

// Greedy upper bound for the s-content of a finite point set: for each
// dyadic radius generation, scan points in order and place a ball on the
// first uncovered one; report the cheapest generation.  Any concrete cover
// bounds the infimum from above.
inline double content_upper(const std::vector<Point>& pts, double s, double h, int Q) {
    if (!(s > 0)) throw std::invalid_argument("content exponent must be positive");
    if (!(h > 0)) throw std::invalid_argument("cell side must be positive");
    if (pts.empty()) return 0.0;

    double diam = 0;
    for (int ax = 0; ax < Q; ++ax) {
        double lo = pts[0][ax], hi = pts[0][ax];
        for (const auto& p : pts) {
            lo = std::min(lo, p[ax]);
            hi = std::max(hi, p[ax]);
        }
        diam += (hi - lo) * (hi - lo);
    }
    diam = std::sqrt(diam);

    int g_lo = (int)std::floor(std::log2(0.5 * h));
    int g_hi = std::max(g_lo, (int)std::ceil(std::log2(std::max(2.0 * diam, h))));
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> covered(pts.size());
    for (int g = g_lo; g <= g_hi; ++g) {
        double r = std::ldexp(1.0, g);
        std::fill(covered.begin(), covered.end(), 0);
        double cost = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (covered[i]) continue;
            cost += std::pow(r, s);
            for (size_t j = i; j < pts.size(); ++j)
                if (!covered[j] && dist_q(pts[i], pts[j], Q) < r) covered[j] = 1;
        }
        best = std::min(best, cost);
    }
    return best;
}

// Certified content lower bound for the trace of a c_UP-uniformly-perfect
// set on closure(B(x0, r0)) (merge factor alpha fixed to 2):
//   H^eps >= r0^eps / (2 c_up + 2)^eps.
inline double content_lower_via_perfectness(double r0, double c_up, double eps) {
    if (!(r0 > 0)) throw std::invalid_argument("r0 must be positive");
    if (!(c_up >= 1.0)) throw std::invalid_argument("c_up must be at least 1");
    if (!(eps > 0) || !(eps < epsilon_threshold(2.0 * c_up)))
        throw std::runtime_error("exponent above merge threshold");
    return std::pow(r0, eps) / std::pow(2.0 * c_up + 2.0, eps);
}

// ----- CSV serialization -----

inline void write_cover_csv(std::ostream& os, const BallCover& c, int Q) {
    os << (Q == 3 ? "cx,cy,cz,r\n" : "cx,cy,r\n");
    for (const auto& b : c.balls) {
        os << format_double(b.center[0]) << "," << format_double(b.center[1]);
        if (Q == 3) os << "," << format_double(b.center[2]);
        os << "," << format_double(b.radius) << "\n";
    }
}

inline void write_merge_trace_csv(std::ostream& os, const std::vector<MergeStep>& steps) {
    os << "step,i,j,new_r,sum_eps\n";
    for (const auto& s : steps)
        os << s.step << "," << s.i << "," << s.j << ","
           << format_double(s.new_radius) << "," << format_double(s.cost_after) << "\n";
}

} // namespace gridcap
