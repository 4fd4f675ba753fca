#pragma once

// Discrete p-Hardy functionals.
//
// The Hardy quotient of a grid function u vanishing outside the domain is
//
//   q(u) = ∫ g_u^p dμ  /  ∫ (|u| / dist)^p dμ ,
//
// with the same forward-difference gradient magnitude as the capacity
// energy and dist the grid's distance-to-complement field.  The best Hardy
// constant is c_H = sup_u 1/q(u); it is estimated by minimizing the energy
// over the unit-weighted-norm sphere with projected descent and multiple
// starts, tracked across a refinement ladder (a single grid value cannot
// witness an infimum over an infinite-dimensional class — only the trend
// across refinements is meaningful).
//
// Also here: the explicit annular test function with its two-sided bounds,
// the Maz'ya-type quotient over compact plates, and the dyadic level-set
// decomposition check behind the Maz'ya criterion's sufficiency direction.

#include "capacity.hpp"
#include "trend.hpp"

#include <cmath>

namespace gridcap {

// ----- pointwise functionals -----

// Energy Σ (Σ_axes δ²)^{p/2} h^{Q-p} over the whole grid (cells beyond the
// grid count as zeros).
inline double grid_energy(const MetricGrid& g, const std::vector<double>& u, double p) {
    const bool quadratic = p == 2.0;
    double acc = 0;
    const int64_t n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
    const int64_t s1 = n0, s2 = n0 * n1;
    for (int64_t k = 0; k < n2; ++k)
        for (int64_t j = 0; j < n1; ++j) {
            int64_t base = k * s2 + j * s1;
            for (int64_t i = 0; i < n0; ++i) {
                int64_t idx = base + i;
                double ux = u[idx];
                double dx = (i + 1 < n0 ? u[idx + 1] : 0.0) - ux;
                double dy = (j + 1 < n1 ? u[idx + s1] : 0.0) - ux;
                double s = dx * dx + dy * dy;
                if (g.params.Q == 3) {
                    double dz = (k + 1 < n2 ? u[idx + s2] : 0.0) - ux;
                    s += dz * dz;
                }
                acc += quadratic ? s : std::pow(s, 0.5 * p);
            }
        }
    return acc * std::pow(g.params.h, g.params.Q - p);
}

// dE/du across the whole grid (without the constant h^{Q-p} factor).
inline void grid_energy_gradient(const MetricGrid& g, const std::vector<double>& u,
                                 double p, std::vector<double>& grad) {
    grad.assign(u.size(), 0.0);
    const int64_t n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
    const int64_t s1 = n0, s2 = n0 * n1;
    for (int64_t k = 0; k < n2; ++k)
        for (int64_t j = 0; j < n1; ++j) {
            int64_t base = k * s2 + j * s1;
            for (int64_t i = 0; i < n0; ++i) {
                int64_t idx = base + i;
                double ux = u[idx];
                double d[3] = {0, 0, 0};
                int64_t nb[3] = {-1, -1, -1};
                if (i + 1 < n0) nb[0] = idx + 1;
                if (j + 1 < n1) nb[1] = idx + s1;
                if (g.params.Q == 3 && k + 1 < n2) nb[2] = idx + s2;
                double s = 0;
                for (int a = 0; a < g.params.Q; ++a) {
                    d[a] = (nb[a] >= 0 ? u[nb[a]] : 0.0) - ux;
                    s += d[a] * d[a];
                }
                if (s < 1e-300) continue;
                double f = p * std::pow(s, 0.5 * p - 1.0);
                for (int a = 0; a < g.params.Q; ++a) {
                    grad[idx] -= f * d[a];
                    if (nb[a] >= 0) grad[nb[a]] += f * d[a];
                }
            }
        }
}

// Weighted norm ∫ (|u|/dist)^p dμ over domain cells.  Complement cells have
// dist = 0 and are excluded: admissible functions vanish there anyway.
inline double weighted_norm(const MetricGrid& g, const std::vector<double>& u, double p) {
    double acc = 0;
    const int64_t N = g.cell_count();
    const double half_h = 0.5 * g.params.h;
    for (int64_t i = 0; i < N; ++i) {
        if (!g.domain[i] || g.dist[i] < half_h) continue;
        double t = std::abs(u[i]) / g.dist[i];
        acc += std::pow(t, p);
    }
    return acc * g.cell_volume();
}

// Energy / weighted norm; the best Hardy constant is the sup of the inverse.
inline double hardy_quotient(const MetricGrid& g, const std::vector<double>& u, double p) {
    std::vector<double> v(u);
    for (int64_t i = 0; i < g.cell_count(); ++i)
        if (!g.domain[i]) v[i] = 0.0; // values outside the domain are inadmissible
    double w = weighted_norm(g, v, p);
    if (w == 0) throw std::runtime_error("trivial function");
    return grid_energy(g, v, p) / w;
}

// ----- annular test function -----

struct AnnularTestFunction {
    Point x0{0, 0, 0};
    double r0 = 0;
    double m = 0;
    std::vector<double> values;
};

// Three-piece radial profile: 0 on B(x0, r0), linear ramp up to 2 r0,
// plateau 1 on A(x0, 2 r0, m r0/2), linear ramp down to m r0, 0 beyond.
inline AnnularTestFunction annular_test_function(const MetricGrid& g, const Point& x0,
                                                 double r0, double m) {
    if (!(m > 4.0)) throw std::runtime_error("annular profile requires m > 4");
    if (!(r0 > 0)) throw std::invalid_argument("r0 must be positive");
    for (int a = 0; a < g.params.Q; ++a)
        if (x0[a] - m * r0 < g.params.bbox.lo[a] || x0[a] + m * r0 > g.params.bbox.hi[a])
            throw std::invalid_argument("ball exceeds bounding box");

    AnnularTestFunction f;
    f.x0 = x0;
    f.r0 = r0;
    f.m = m;
    f.values.assign(g.cell_count(), 0.0);
    for (int64_t idx = 0; idx < g.cell_count(); ++idx) {
        double d = dist_q(g.cell_center(idx), x0, g.params.Q);
        double v;
        if (d <= 2.0 * r0)
            v = std::clamp(d / r0 - 1.0, 0.0, 1.0);
        else if (d < 0.5 * m * r0)
            v = 1.0;
        else
            v = std::clamp(2.0 - 2.0 * d / (m * r0), 0.0, 1.0);
        f.values[idx] = v;
    }
    return f;
}

struct AnnularBoundsReport {
    double energy = 0;
    double energy_bound = 0;     // c_A 2^{Q+1} (+10% applied by callers)
    double weighted = 0;
    double weighted_bound = 0;   // log(m/4) / (4^Q c_A log 2)
    bool energy_ok = false;      // energy <= bound * 1.1
    bool weighted_ok = false;    // weighted >= bound * 0.9
    double m_bound_value = 0;    // 4 exp(2^{Q+1} c_H c_A / c) for the supplied c_H
    double m_bound_log = 0;
};

// Evaluates both sides of the annular-function estimates at p = Q: the
// energy is bounded by a constant, while the weighted norm grows like
// log(m/4) — so domains whose complement tolerates wide empty annuli cannot
// satisfy a Hardy inequality.  Requires A(x0, r0, m r0) to lie inside the
// domain, i.e. the complement is absent between the scales r0 and m r0.
inline AnnularBoundsReport verify_annular_bounds(const MetricGrid& g, const Point& x0,
                                                 double r0, double m, double c_H = 1.0) {
    AnnularTestFunction f = annular_test_function(g, x0, r0, m);
    const int Q = g.params.Q;
    const double c_A = g.params.c_A;

    for (int64_t idx = 0; idx < g.cell_count(); ++idx) {
        double d = dist_q(g.cell_center(idx), x0, Q);
        if (d > r0 && d < m * r0 && !g.domain[idx])
            throw std::runtime_error("annulus not contained in domain");
    }

    AnnularBoundsReport rep;
    rep.energy = grid_energy(g, f.values, double(Q));
    rep.energy_bound = c_A * std::pow(2.0, Q + 1);
    rep.weighted = weighted_norm(g, f.values, double(Q));
    rep.weighted_bound = std::log(m / 4.0) / (std::pow(4.0, Q) * c_A * std::log(2.0));
    rep.energy_ok = rep.energy <= rep.energy_bound * 1.1;
    rep.weighted_ok = rep.weighted >= rep.weighted_bound * 0.9;

    double c = 1.0 / (std::pow(4.0, Q) * c_A * std::log(2.0));
    rep.m_bound_log = std::log(4.0) + std::pow(2.0, Q + 1) * c_H * c_A / c;
    rep.m_bound_value = std::exp(rep.m_bound_log);
    return rep;
}

// ----- Hardy constant estimation -----

struct HardyOptions {
    double tol = 1e-6;        // relative quotient decrement considered converged
    int64_t max_iters = 0;    // per minimization; 0 = automatic
    int random_restarts = 9;  // on the coarsest level, besides the profile start
    int smoothing_sweeps = 5; // neighbor-averaging passes on random starts
    int tent_seeds = 6;       // localized log-tent starts at boundary samples
    uint64_t seed = 1;
};

struct HardyLevel {
    double h = 0;
    double energy = 0;  // minimal energy at unit weighted norm
    double c_h_est = 0; // 1 / energy
    bool converged = false;
    int64_t iterations = 0;
};

struct HardyEstimate {
    double p = 2;
    std::vector<HardyLevel> levels;
    Trend trend = Trend::Stable;
    bool holds = false;                  // trend not diverging
    std::vector<double> minimizer;       // finest-level best function
};

namespace detail {

// One projected-descent minimization of E(u) with the weighted norm pinned
// to 1 by renormalization; |u| is taken each step (it never increases the
// energy and keeps iterates nonnegative).
inline HardyLevel hardy_minimize(const MetricGrid& g, double p, std::vector<double>& u,
                                 const HardyOptions& opt, int64_t max_iters) {
    HardyLevel lev;
    lev.h = g.params.h;
    const int64_t N = g.cell_count();

    auto project = [&](std::vector<double>& v) -> bool {
        for (int64_t i = 0; i < N; ++i) v[i] = g.domain[i] ? std::abs(v[i]) : 0.0;
        double w = weighted_norm(g, v, p);
        if (!(w > 0)) return false;
        double scale = std::pow(w, -1.0 / p);
        for (int64_t i = 0; i < N; ++i) v[i] *= scale;
        return true;
    };

    if (!project(u)) throw std::runtime_error("trivial function");
    double q = grid_energy(g, u, p);
    std::vector<double> grad, cand(u.size());
    double step = 1.0;
    int small_steps = 0;
    while (lev.iterations < max_iters) {
        grid_energy_gradient(g, u, p, grad);
        bool accepted = false;
        double q_new = q;
        for (int halve = 0; halve < 60; ++halve) {
            for (int64_t i = 0; i < N; ++i)
                cand[i] = g.domain[i] ? u[i] - step * grad[i] : 0.0;
            if (!project(cand)) {
                step *= 0.5;
                continue;
            }
            q_new = grid_energy(g, cand, p);
            if (q_new <= q * (1.0 - 1e-14)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            lev.converged = true;
            break;
        }
        double rel = (q - q_new) / std::max(q_new, 1e-300);
        u.swap(cand);
        q = q_new;
        ++lev.iterations;
        step *= 2.0;
        if (rel < opt.tol) {
            if (++small_steps >= 2) {
                lev.converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    lev.energy = q;
    lev.c_h_est = 1.0 / q;
    return lev;
}

inline std::vector<double> hardy_profile_start(const MetricGrid& g) {
    std::vector<double> u(g.dist.begin(), g.dist.end());
    return u;
}

// p = 2 only: minimizing the energy at unit weighted norm is a generalized
// eigenproblem  A u = lambda D u  with A the quadratic energy form and D the
// Hardy weight.  Inverse power iteration (CG inner solves) converges to the
// smallest eigenvalue from any start overlapping the ground mode; projected
// descent instead rotates into that mode arbitrarily slowly when the
// spectral gap is small, as it is near isolated thin boundary pieces, and
// then under-reports the growth of the constant under refinement.
inline HardyLevel hardy_minimize_quadratic(const MetricGrid& g, std::vector<double>& u,
                                           const HardyOptions& opt, int64_t inner_cap) {
    HardyLevel lev;
    lev.h = g.params.h;
    const int64_t N = g.cell_count();

    std::vector<double> w(N, 0.0); // W(u) = sum_i w_i u_i^2
    const double hQ = std::pow(g.params.h, g.params.Q);
    for (int64_t i = 0; i < N; ++i)
        if (g.domain[i]) w[i] = hQ / (g.dist[i] * g.dist[i]);

    std::vector<double> grad;
    auto apply_energy = [&](const std::vector<double>& x, std::vector<double>& y) {
        grid_energy_gradient(g, x, 2.0, grad); // gradient of a quadratic: 2 A x
        y.resize(N);
        for (int64_t i = 0; i < N; ++i) y[i] = 0.5 * grad[i];
    };

    auto normalize = [&](std::vector<double>& v) -> bool {
        double acc = 0;
        for (int64_t i = 0; i < N; ++i) {
            if (!g.domain[i]) v[i] = 0;
            acc += w[i] * v[i] * v[i];
        }
        if (!(acc > 0)) return false;
        double s = 1.0 / std::sqrt(acc);
        for (int64_t i = 0; i < N; ++i) v[i] *= s;
        return true;
    };

    if (!normalize(u)) throw std::runtime_error("trivial function");
    double lambda = grid_energy(g, u, 2.0);

    std::vector<double> b(N), x(N), r(N), d(N), Ad(N);
    int small_steps = 0;
    for (int outer = 0; outer < 60; ++outer) {
        for (int64_t i = 0; i < N; ++i) b[i] = w[i] * u[i];
        // CG on A x = b, warm-started at the current eigenvector scale
        for (int64_t i = 0; i < N; ++i) x[i] = u[i] / std::max(lambda, 1e-300);
        apply_energy(x, Ad);
        double bn = 0;
        for (int64_t i = 0; i < N; ++i) {
            r[i] = g.domain[i] ? b[i] - Ad[i] : 0.0;
            bn += b[i] * b[i];
        }
        d = r;
        double rs = 0;
        for (int64_t i = 0; i < N; ++i) rs += r[i] * r[i];
        for (int64_t k = 0; k < inner_cap && rs > 1e-20 * bn; ++k) {
            apply_energy(d, Ad);
            double dAd = 0;
            for (int64_t i = 0; i < N; ++i) dAd += d[i] * Ad[i];
            if (!(dAd > 0)) break;
            double alpha = rs / dAd;
            for (int64_t i = 0; i < N; ++i) {
                x[i] += alpha * d[i];
                if (g.domain[i]) r[i] -= alpha * Ad[i];
            }
            double rs2 = 0;
            for (int64_t i = 0; i < N; ++i) rs2 += r[i] * r[i];
            double beta = rs2 / rs;
            for (int64_t i = 0; i < N; ++i) d[i] = r[i] + beta * d[i];
            rs = rs2;
            ++lev.iterations;
        }
        if (!normalize(x)) break;
        u.swap(x);
        double next = grid_energy(g, u, 2.0);
        double rel = std::abs(lambda - next) / std::max(next, 1e-300);
        lambda = next;
        if (rel < opt.tol) {
            if (++small_steps >= 2) {
                lev.converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    lev.energy = lambda;
    lev.c_h_est = 1.0 / lambda;
    return lev;
}

// Log-singular start: near thin boundary pieces (points, low-dimensional
// sets) the extremal profile grows like log(dist/h), which plain descent
// from smooth starts approaches too slowly to expose the divergence rate
// of the constant under refinement.
inline std::vector<double> hardy_log_start(const MetricGrid& g) {
    std::vector<double> u(g.cell_count(), 0.0);
    for (int64_t i = 0; i < g.cell_count(); ++i)
        if (g.domain[i]) u[i] = std::log1p(g.dist[i] / g.params.h);
    return u;
}

// Complement cells face-adjacent to the domain, subsampled farthest-point
// style.  The walk starts at the boundary cell deepest inside the bounding
// box, so isolated thin pieces (a puncture, the middle of a slit) are
// visited before the outer frame.
inline std::vector<Point> boundary_seeds(const MetricGrid& g, int count) {
    const int64_t strides[3] = {1, g.n[0], g.n[0] * g.n[1]};
    std::vector<Point> cand;
    for (int64_t idx = 0; idx < g.cell_count(); ++idx) {
        if (g.domain[idx]) continue;
        auto c = g.coords(idx);
        bool touches = false;
        for (int a = 0; a < g.params.Q && !touches; ++a) {
            if (c[a] + 1 < g.n[a] && g.domain[idx + strides[a]]) touches = true;
            if (c[a] > 0 && g.domain[idx - strides[a]]) touches = true;
        }
        if (touches) cand.push_back(g.cell_center(idx));
    }
    if (cand.empty()) return cand;

    auto wall_gap = [&](const Point& x) {
        double fit = std::numeric_limits<double>::infinity();
        for (int a = 0; a < g.params.Q; ++a) {
            fit = std::min(fit, x[a] - g.params.bbox.lo[a]);
            fit = std::min(fit, g.params.bbox.hi[a] - x[a]);
        }
        return fit;
    };
    size_t first = 0;
    for (size_t k = 1; k < cand.size(); ++k)
        if (wall_gap(cand[k]) > wall_gap(cand[first])) first = k;

    std::vector<Point> seeds{cand[first]};
    std::vector<double> d2(cand.size());
    auto dist2 = [&](const Point& a, const Point& b) {
        double acc = 0;
        for (int ax = 0; ax < g.params.Q; ++ax) acc += (a[ax] - b[ax]) * (a[ax] - b[ax]);
        return acc;
    };
    for (size_t k = 0; k < cand.size(); ++k) d2[k] = dist2(cand[k], seeds[0]);
    while ((int)seeds.size() < count) {
        size_t far = 0;
        for (size_t k = 1; k < cand.size(); ++k)
            if (d2[k] > d2[far]) far = k;
        if (!(d2[far] > 0)) break;
        seeds.push_back(cand[far]);
        for (size_t k = 0; k < cand.size(); ++k) d2[k] = std::min(d2[k], dist2(cand[k], seeds.back()));
    }
    return seeds;
}

// Log tent in |x - c|: zero at radius h, peaks at sqrt(R h), zero again at
// R.  Around an isolated boundary point this is within a bounded factor of
// the extremal profile, so it seeds the mode whose quotient grows like
// log^2(R/h); around a fat boundary piece its quotient stays bounded and
// descent simply absorbs it.
inline std::vector<double> hardy_tent_start(const MetricGrid& g, const Point& c) {
    const double h = g.params.h;
    const double R = 0.25 * g.params.bbox.min_side(g.params.Q);
    std::vector<double> u(g.cell_count(), 0.0);
    for (int64_t i = 0; i < g.cell_count(); ++i) {
        if (!g.domain[i]) continue;
        Point x = g.cell_center(i);
        double r = 0;
        for (int a = 0; a < g.params.Q; ++a) r += (x[a] - c[a]) * (x[a] - c[a]);
        r = std::max(std::sqrt(r), h);
        u[i] = std::max(0.0, std::min(std::log(r / h), std::log(R / r)));
    }
    return u;
}

inline std::vector<double> hardy_random_start(const MetricGrid& g, uint64_t seed,
                                              int sweeps) {
    const int64_t N = g.cell_count();
    SplitMix64 rng(seed);
    std::vector<double> u(N, 0.0);
    for (int64_t i = 0; i < N; ++i)
        if (g.domain[i]) u[i] = rng.uniform();
    std::vector<double> v(N);
    for (int s = 0; s < sweeps; ++s) {
        for (int64_t idx = 0; idx < N; ++idx) {
            if (!g.domain[idx]) {
                v[idx] = 0;
                continue;
            }
            auto c = g.coords(idx);
            double acc = u[idx];
            int cnt = 1;
            const int64_t strides[3] = {1, g.n[0], g.n[0] * g.n[1]};
            for (int a = 0; a < g.params.Q; ++a) {
                if (c[a] + 1 < g.n[a] && g.domain[idx + strides[a]]) {
                    acc += u[idx + strides[a]];
                    ++cnt;
                }
                if (c[a] > 0 && g.domain[idx - strides[a]]) {
                    acc += u[idx - strides[a]];
                    ++cnt;
                }
            }
            v[idx] = acc / cnt;
        }
        u.swap(v);
    }
    return u;
}

// Transfer a coarse-grid function to a finer grid of the same bbox by
// piecewise-constant prolongation.
inline std::vector<double> prolong(const MetricGrid& coarse, const std::vector<double>& uc,
                                   const MetricGrid& fine) {
    std::vector<double> uf(fine.cell_count(), 0.0);
    for (int64_t idx = 0; idx < fine.cell_count(); ++idx) {
        if (!fine.domain[idx]) continue;
        int64_t cidx = coarse.containing_cell(fine.cell_center(idx));
        uf[idx] = uc[cidx];
    }
    return uf;
}

} // namespace detail

// Estimates the Hardy constant across `refinements` grid levels (the given
// grid plus halved-h rebuilds of its domain spec).  The coarsest level runs
// a profile start plus random restarts; finer levels start from the
// prolonged best minimizer and the distance profile.
inline HardyEstimate estimate_hardy_constant(const MetricGrid& grid, double p,
                                             int refinements,
                                             const HardyOptions& opt = {}) {
    if (refinements < 2)
        throw std::invalid_argument("need at least two refinement levels for a trend");
    HardyEstimate est;
    est.p = p;

    MetricGrid cur = grid;
    MetricGrid prev;
    std::vector<double> best_prev;
    for (int level = 0; level < refinements; ++level) {
        if (level > 0) {
            prev = std::move(cur);
            cur = refine(prev);
        }
        int64_t max_iters = opt.max_iters;
        if (max_iters <= 0) max_iters = level == 0 ? 3000 : 1200;

        const bool quadratic = (p == 2.0);
        std::vector<std::vector<double>> starts;
        if (level == 0) {
            starts.push_back(detail::hardy_profile_start(cur));
            starts.push_back(detail::hardy_log_start(cur));
            if (!quadratic)
                for (int r = 0; r < opt.random_restarts; ++r)
                    starts.push_back(detail::hardy_random_start(
                        cur, derive_seed(opt.seed, uint64_t(level) * 64 + r),
                        opt.smoothing_sweeps));
        } else {
            starts.push_back(detail::prolong(prev, best_prev, cur));
            if (!quadratic) starts.push_back(detail::hardy_profile_start(cur));
            starts.push_back(detail::hardy_log_start(cur));
        }
        if (!quadratic)
            for (const Point& c : detail::boundary_seeds(cur, opt.tent_seeds))
                starts.push_back(detail::hardy_tent_start(cur, c));

        HardyLevel best;
        std::vector<double> best_u;
        bool have = false;
        for (auto& u : starts) {
            std::vector<double> w = std::move(u);
            HardyLevel lev = quadratic
                                 ? detail::hardy_minimize_quadratic(cur, w, opt, max_iters)
                                 : detail::hardy_minimize(cur, p, w, opt, max_iters);
            if (!have || lev.energy < best.energy) {
                best = lev;
                best_u = std::move(w);
                have = true;
            }
        }
        est.levels.push_back(best);
        best_prev = std::move(best_u);
    }
    std::vector<double> ladder;
    for (const auto& lev : est.levels) ladder.push_back(lev.c_h_est);
    est.trend = classify_trend(ladder);
    est.holds = est.trend != Trend::Diverging;
    est.minimizer = std::move(best_prev);
    return est;
}

// ----- Maz'ya quotient -----

struct MazyaReport {
    double numerator = 0; // ∫_K dist^{-p} dμ
    double capacity = 0;  // cap_p(K, Ω)
    double quotient = 0;
    bool converged = false;
};

// The Maz'ya-type criterion compares the weighted content of a compact plate
// with its capacity relative to the domain; Hardy holds exactly when this
// quotient is uniformly bounded over plates.
inline MazyaReport mazya_check(const MetricGrid& g, const SetMask& K, double p) {
    if (K.size() == 0) throw std::runtime_error("empty mask: plate");
    double min_dist = std::numeric_limits<double>::infinity();
    for (int64_t idx : K.cells) min_dist = std::min(min_dist, g.dist[idx]);
    if (!(min_dist >= 2.0 * g.params.h))
        throw std::runtime_error("K not compactly contained");

    MazyaReport rep;
    for (int64_t idx : K.cells)
        rep.numerator += std::pow(g.dist[idx], -p);
    rep.numerator *= g.cell_volume();

    CapacityProblem prob;
    prob.grid = &g;
    prob.plate = K;
    prob.env = mask_from_predicate(g, [&](int64_t idx) { return g.domain[idx] != 0; },
                                   "domain");
    prob.p = p;
    CapacityResult cap = solve_capacity(prob);
    rep.capacity = cap.value;
    rep.converged = cap.converged;
    rep.quotient = cap.value > 0 ? rep.numerator / cap.value : 0;
    return rep;
}

// ----- dyadic level-set decomposition -----

struct LevelsetReport {
    double energy = 0;       // ∫ g_u^p
    double weighted = 0;     // ∫ (|u|/dist)^p
    double capacity_sum = 0; // Σ_k 2^{(k+1)p} cap_p({|u| ≥ 2^{k+1}}, {|u| > 2^k})
    double weighted_sum = 0; // Σ_k 2^{(k+1)p} ∫_{E_k∖E_{k+1}} dist^{-p}
    int k_lo = 0, k_hi = 0;
    bool capacity_ok = false; // capacity_sum ≤ 2^p · energy · 1.15
    bool weighted_ok = false; // weighted ≤ weighted_sum · 1.15
};

// Verifies the two inequalities behind the sufficiency direction of the
// Maz'ya criterion for a concrete function: the dyadic level sets
// E_k = {|u| > 2^k} satisfy (a) a capacity sum bounded by the energy and
// (b) a re-binning bound on the weighted norm.
inline LevelsetReport levelset_decomposition_check(const MetricGrid& g,
                                                   const std::vector<double>& u_in,
                                                   double p) {
    const int64_t N = g.cell_count();
    std::vector<double> u(N, 0.0);
    double max_abs = 0;
    for (int64_t i = 0; i < N; ++i) {
        if (!g.domain[i]) continue;
        u[i] = std::abs(u_in[i]);
        max_abs = std::max(max_abs, u[i]);
    }
    if (max_abs == 0) throw std::runtime_error("trivial function");
    if (max_abs > std::ldexp(1.0, 60)) throw std::runtime_error("level range exceeds safety clamp");

    LevelsetReport rep;
    rep.energy = grid_energy(g, u, p);
    rep.weighted = weighted_norm(g, u, p);

    int k_hi = (int)std::floor(std::log2(max_abs));
    if (std::ldexp(1.0, k_hi) >= max_abs) --k_hi; // want 2^{k_hi} < max_abs
    k_hi = std::clamp(k_hi, -60, 60);
    rep.k_hi = k_hi;
    rep.k_lo = -60;

    auto level_mask = [&](double threshold, bool strict) {
        std::vector<int64_t> cells;
        for (int64_t i = 0; i < N; ++i)
            if (strict ? u[i] > threshold : u[i] >= threshold) cells.push_back(i);
        return cells;
    };

    std::vector<int64_t> support = level_mask(0.0, true);
    for (int k = k_hi; k >= -60; --k) {
        double lo = std::ldexp(1.0, k), hi = std::ldexp(1.0, k + 1);
        std::vector<int64_t> env = level_mask(lo, true);
        std::vector<int64_t> plate = level_mask(hi, false);

        double cap = 0;
        if (!plate.empty()) {
            if (plate.size() == env.size()) {
                // forced configuration: no free cells, energy of the indicator
                std::vector<double> ind(N, 0.0);
                for (int64_t idx : env) ind[idx] = 1.0;
                cap = grid_energy(g, ind, p);
            } else {
                CapacityProblem prob;
                prob.grid = &g;
                prob.plate = SetMask{plate};
                prob.env = SetMask{env};
                prob.p = p;
                cap = solve_capacity(prob).value;
            }
        }
        double w = std::pow(hi, p);
        rep.capacity_sum += w * cap;

        double tail_w = 0;
        std::vector<int64_t> env_next = level_mask(hi, true); // E_{k+1}
        size_t t = 0;
        for (int64_t idx : env) {
            while (t < env_next.size() && env_next[t] < idx) ++t;
            if (t < env_next.size() && env_next[t] == idx) continue;
            if (g.dist[idx] >= 0.5 * g.params.h) tail_w += std::pow(g.dist[idx], -p);
        }
        rep.weighted_sum += w * tail_w * g.cell_volume();

        // once every support cell clears both thresholds the remaining terms
        // form an exact geometric tail: E_{k'} = plate = support for k' < k
        if (env.size() == support.size() && plate.size() == support.size()) {
            std::vector<double> ind(N, 0.0);
            for (int64_t idx : support) ind[idx] = 1.0;
            double c_star = grid_energy(g, ind, p);
            for (int kk = k - 1; kk >= -60; --kk)
                rep.capacity_sum += std::pow(std::ldexp(1.0, kk + 1), p) * c_star;
            rep.k_lo = k;
            break;
        }
        rep.k_lo = k;
    }

    rep.capacity_ok = rep.capacity_sum <= std::pow(2.0, p) * rep.energy * 1.15;
    rep.weighted_ok = rep.weighted <= rep.weighted_sum * 1.15;
    return rep;
}

} // namespace gridcap
