#pragma once

// Discrete p-capacity of a condenser (plate, environment) on a metric grid.
//
// The potential u is 1 on the plate, 0 outside the environment, and free on
// environment cells off the plate.  The energy uses forward differences to
// face neighbors:
//
//   E_p(u) = sum_cells (sum_axes (u[c+e_a] - u[c])^2)^(p/2) * h^(Q-p)
//
// cap_p(plate, env) = min over admissible u of E_p(u).
//
// p = 2 is solved exactly (to tolerance) by conjugate gradients on the free
// cells; p != 2 by iteratively reweighted least squares (freeze the per-cell
// weight |du|^(p-2), solve the weighted quadratic form by CG, repeat with a
// monotone line search on the true energy) started from the p = 2 solution,
// followed by a projected-descent polish that certifies stationarity.  All
// work happens inside a window (environment bounding box padded by two
// cells): every edge with a nonzero difference has both endpoints within one
// cell of the environment, so the truncation is exact.

#include "grid.hpp"

#include <cmath>
#include <numbers>

namespace gridcap {

struct CapacityProblem {
    const MetricGrid* grid = nullptr;
    SetMask plate;            // u = 1 here
    SetMask env;              // u free here (minus plate), 0 everywhere else
    double p = 2.0;
    double tol = 1e-8;        // relative: CG residual / GD energy decrement
    int64_t max_iters = 0;    // 0 = automatic
    bool record_trace = false;
};

struct CondenserWindow {
    std::array<int64_t, 3> lo{0, 0, 0};
    std::array<int64_t, 3> dims{1, 1, 1};
    int64_t size() const { return dims[0] * dims[1] * dims[2]; }
};

struct CapacityResult {
    double value = 0;                 // minimized energy
    std::vector<double> potential;    // full-grid potential
    int64_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;        // energy per accepted step, if recorded
    CondenserWindow window;
};

namespace detail {

enum class CellRole : uint8_t { Free = 0, Plate = 1, Zero = 2 };

struct CondenserSystem {
    const MetricGrid* grid;
    CondenserWindow win;
    int Q;
    double h;
    std::array<int64_t, 3> stride{1, 1, 1};
    std::vector<CellRole> role;
    std::vector<int64_t> free_cells; // window indices
    std::vector<double> u;           // window potential incl. fixed values

    int64_t windex(int64_t i, int64_t j, int64_t k) const {
        return (k * win.dims[1] + j) * win.dims[0] + i;
    }

    // forward neighbor along axis, or -1 when it leaves the window (value 0)
    int64_t fwd(int64_t w, const std::array<int64_t, 3>& c, int axis) const {
        return c[axis] + 1 < win.dims[axis] ? w + stride[axis] : -1;
    }
};

inline CondenserSystem build_system(const CapacityProblem& prob) {
    const MetricGrid& g = *prob.grid;
    CondenserSystem sys;
    sys.grid = prob.grid;
    sys.Q = g.params.Q;
    sys.h = g.params.h;

    std::array<int64_t, 3> lo{g.n[0], g.n[1], g.n[2]}, hi{-1, -1, -1};
    for (int64_t idx : prob.env.cells) {
        auto c = g.coords(idx);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    for (int a = 0; a < 3; ++a) {
        sys.win.lo[a] = std::max<int64_t>(0, lo[a] - 2);
        sys.win.dims[a] = std::min(g.n[a] - 1, hi[a] + 2) - sys.win.lo[a] + 1;
    }
    sys.stride = {1, sys.win.dims[0], sys.win.dims[0] * sys.win.dims[1]};

    auto to_window = [&](int64_t idx) {
        auto c = g.coords(idx);
        return sys.windex(c[0] - sys.win.lo[0], c[1] - sys.win.lo[1], c[2] - sys.win.lo[2]);
    };

    sys.role.assign(sys.win.size(), CellRole::Zero);
    for (int64_t idx : prob.env.cells) sys.role[to_window(idx)] = CellRole::Free;
    for (int64_t idx : prob.plate.cells) {
        auto c = g.coords(idx);
        for (int a = 0; a < 3; ++a) {
            int64_t wc = c[a] - sys.win.lo[a];
            if (wc < 0 || wc >= sys.win.dims[a])
                throw std::runtime_error("plate escapes environment");
        }
        int64_t w = to_window(idx);
        if (sys.role[w] != CellRole::Free)
            throw std::runtime_error("plate escapes environment");
        sys.role[w] = CellRole::Plate;
    }
    for (int64_t w = 0; w < sys.win.size(); ++w)
        if (sys.role[w] == CellRole::Free) sys.free_cells.push_back(w);

    sys.u.assign(sys.win.size(), 0.0);
    for (int64_t w = 0; w < sys.win.size(); ++w)
        if (sys.role[w] == CellRole::Plate) sys.u[w] = 1.0;
    return sys;
}

inline std::array<int64_t, 3> wcoords(const CondenserSystem& sys, int64_t w) {
    int64_t i = w % sys.win.dims[0];
    int64_t j = (w / sys.win.dims[0]) % sys.win.dims[1];
    int64_t k = w / (sys.win.dims[0] * sys.win.dims[1]);
    return {i, j, k};
}

inline double condenser_energy(const CondenserSystem& sys, const std::vector<double>& u,
                               double p) {
    const int64_t W = sys.win.size();
    double acc = 0;
    const bool quadratic = p == 2.0;
    for (int64_t w = 0; w < W; ++w) {
        auto c = wcoords(sys, w);
        double s = 0;
        for (int a = 0; a < sys.Q; ++a) {
            int64_t nb = sys.fwd(w, c, a);
            double d = (nb >= 0 ? u[nb] : 0.0) - u[w];
            s += d * d;
        }
        acc += quadratic ? s : std::pow(s, 0.5 * p);
    }
    return acc * std::pow(sys.h, sys.Q - p);
}

// dE/du (without the h^(Q-p) factor, which scales uniformly).
inline void condenser_gradient(const CondenserSystem& sys, const std::vector<double>& u,
                               double p, std::vector<double>& grad) {
    const int64_t W = sys.win.size();
    grad.assign(W, 0.0);
    for (int64_t w = 0; w < W; ++w) {
        auto c = wcoords(sys, w);
        double s = 0;
        std::array<double, 3> d{0, 0, 0};
        std::array<int64_t, 3> nb{-1, -1, -1};
        for (int a = 0; a < sys.Q; ++a) {
            nb[a] = sys.fwd(w, c, a);
            d[a] = (nb[a] >= 0 ? u[nb[a]] : 0.0) - u[w];
            s += d[a] * d[a];
        }
        if (s < 1e-300) continue;
        double f = p * std::pow(s, 0.5 * p - 1.0);
        for (int a = 0; a < sys.Q; ++a) {
            grad[w] -= f * d[a];
            if (nb[a] >= 0) grad[nb[a]] += f * d[a];
        }
    }
}

// Conjugate gradients for the p = 2 (Dirichlet) problem.  The operator is the
// 2Q-point lattice Laplacian restricted to free cells; plate neighbors enter
// the right-hand side.
inline int64_t solve_quadratic(CondenserSystem& sys, double tol, int64_t max_iters,
                               bool& converged) {
    const int64_t W = sys.win.size();
    const auto& free_cells = sys.free_cells;
    std::vector<double> x(W, 0.0), b(W, 0.0), r(W, 0.0), pv(W, 0.0), Ap(W, 0.0);

    auto neighbors = [&](int64_t w, const std::array<int64_t, 3>& c, int64_t out[6]) {
        int cnt = 0;
        for (int a = 0; a < sys.Q; ++a) {
            out[cnt++] = c[a] + 1 < sys.win.dims[a] ? w + sys.stride[a] : -1;
            out[cnt++] = c[a] > 0 ? w - sys.stride[a] : -1;
        }
        return cnt;
    };

    int64_t nbs[6];
    for (int64_t w : free_cells) {
        auto c = wcoords(sys, w);
        int cnt = neighbors(w, c, nbs);
        for (int t = 0; t < cnt; ++t)
            if (nbs[t] >= 0 && sys.role[nbs[t]] == CellRole::Plate) b[w] += 1.0;
    }

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int64_t w : free_cells) {
            auto c = wcoords(sys, w);
            int cnt = neighbors(w, c, nbs);
            double acc = 2.0 * sys.Q * in[w];
            for (int t = 0; t < cnt; ++t)
                if (nbs[t] >= 0 && sys.role[nbs[t]] == CellRole::Free) acc -= in[nbs[t]];
            out[w] = acc;
        }
    };

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& bb) {
        double acc = 0;
        for (int64_t w : free_cells) acc += a[w] * bb[w];
        return acc;
    };

    double bnorm2 = dot(b, b);
    converged = true;
    int64_t it = 0;
    if (bnorm2 > 0) {
        r = b; // x = 0 initially
        pv = r;
        double rr = dot(r, r);
        const double stop2 = tol * tol * bnorm2;
        converged = rr <= stop2;
        while (!converged && it < max_iters) {
            apply(pv, Ap);
            double alpha = rr / dot(pv, Ap);
            for (int64_t w : free_cells) {
                x[w] += alpha * pv[w];
                r[w] -= alpha * Ap[w];
            }
            double rr_new = dot(r, r);
            ++it;
            if (rr_new <= stop2) {
                converged = true;
                break;
            }
            double beta = rr_new / rr;
            rr = rr_new;
            for (int64_t w : free_cells) pv[w] = r[w] + beta * pv[w];
        }
    }
    for (int64_t w : free_cells) sys.u[w] = std::clamp(x[w], 0.0, 1.0);
    return it;
}

// Iteratively reweighted least squares for p != 2, warm started from
// whatever sys.u currently holds.  Each outer step freezes the cell weights
// w_c = s_c^(p/2-1) (s_c = squared gradient magnitude, floored by a
// regularizer that tightens over the outer iterations), solves the weighted
// Dirichlet form by CG, and accepts the candidate through a monotone line
// search on the true p-energy.  Returns total inner iterations; `converged`
// reports two consecutive relative energy decrements below tol.
inline int64_t solve_reweighted(CondenserSystem& sys, double p, double tol,
                                int64_t max_outer, bool& converged,
                                std::vector<double>* trace) {
    const auto& free_cells = sys.free_cells;
    const int64_t W = sys.win.size();
    const int64_t n_free = (int64_t)free_cells.size();
    converged = false;
    if (n_free == 0) {
        converged = true;
        return 0;
    }
    const int64_t inner_cap =
        std::max<int64_t>(300, 8 * (int64_t)std::ceil(std::sqrt((double)n_free)));

    // Static adjacency of the free cells: window index of each forward /
    // backward face neighbor, or -1 when the neighbor leaves the window (its
    // value is 0 and, for a backward neighbor, the edge does not exist).
    std::vector<int64_t> fwdw(n_free * 3, -1), bckw(n_free * 3, -1);
    for (int64_t i = 0; i < n_free; ++i) {
        int64_t w = free_cells[i];
        auto c = wcoords(sys, w);
        for (int a = 0; a < sys.Q; ++a) {
            fwdw[i * 3 + a] = sys.fwd(w, c, a);
            bckw[i * 3 + a] = c[a] > 0 ? w - sys.stride[a] : -1;
        }
    }

    std::vector<double> wgt(W, 0.0), diag(W, 0.0), b(W, 0.0), x(W, 0.0), r(W, 0.0),
        pv(W, 0.0), Ap(W, 0.0), cand(sys.u.size());
    double E = condenser_energy(sys, sys.u, p);
    int64_t total_inner = 0;
    int small_steps = 0;

    for (int64_t outer = 0; outer < max_outer; ++outer) {
        // weights from the current iterate, with a floor that tightens as the
        // outer iteration proceeds (graduated regularization of |du|^(p-2))
        double s_max = 0;
        for (int64_t w = 0; w < W; ++w) {
            auto c = wcoords(sys, w);
            double s = 0;
            for (int a = 0; a < sys.Q; ++a) {
                int64_t nb = sys.fwd(w, c, a);
                double d = (nb >= 0 ? sys.u[nb] : 0.0) - sys.u[w];
                s += d * d;
            }
            wgt[w] = s; // stash s_c, turned into a weight below
            s_max = std::max(s_max, s);
        }
        if (s_max <= 0) break; // plate absent or fully shorted: nothing to do
        const double floor_rel = std::max(1e-12, 1e-2 * std::pow(0.25, (double)outer));
        const double floor_k = s_max * floor_rel;
        for (int64_t w = 0; w < W; ++w)
            wgt[w] = std::pow(std::max(wgt[w], floor_k), 0.5 * p - 1.0);

        // weighted Dirichlet subproblem: each energy term is
        // wgt[base] * (u[nbr] - u[base])^2, so an edge carries the weight of
        // the cell whose forward difference it is.  Plate values feed the
        // right-hand side; zero and out-of-window values vanish.
        for (int64_t i = 0; i < n_free; ++i) {
            int64_t w = free_cells[i];
            double dsum = sys.Q * wgt[w];
            double rhs = 0;
            for (int a = 0; a < sys.Q; ++a) {
                int64_t f = fwdw[i * 3 + a];
                if (f >= 0 && sys.role[f] == CellRole::Plate) rhs += wgt[w];
                int64_t bk = bckw[i * 3 + a];
                if (bk >= 0) {
                    dsum += wgt[bk];
                    if (sys.role[bk] == CellRole::Plate) rhs += wgt[bk];
                }
            }
            diag[w] = dsum;
            b[w] = rhs;
        }

        // CG on the free cells; x, r, pv, Ap stay identically zero on fixed
        // cells, so neighbor reads need no role check.
        auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
            for (int64_t i = 0; i < n_free; ++i) {
                int64_t w = free_cells[i];
                double acc = diag[w] * in[w];
                for (int a = 0; a < sys.Q; ++a) {
                    int64_t f = fwdw[i * 3 + a];
                    if (f >= 0) acc -= wgt[w] * in[f];
                    int64_t bk = bckw[i * 3 + a];
                    if (bk >= 0) acc -= wgt[bk] * in[bk];
                }
                out[w] = acc;
            }
        };
        auto dot = [&](const std::vector<double>& u1, const std::vector<double>& u2) {
            double acc = 0;
            for (int64_t w : free_cells) acc += u1[w] * u2[w];
            return acc;
        };

        for (int64_t w : free_cells) x[w] = sys.u[w]; // warm start
        apply(x, Ap);
        for (int64_t w : free_cells) r[w] = b[w] - Ap[w];
        double rr = dot(r, r);
        const double bnorm2 = std::max(dot(b, b), 1e-300);
        // require a fixed residual *reduction* per outer step (the warm start
        // is already close in norm, so a plain relative-to-b test would let
        // CG exit without moving), but never past solver precision
        const double stop2 = std::max(1e-4 * rr, 1e-20 * bnorm2);
        // Jacobi-preconditioned CG; the floored weights keep diag positive
        for (int64_t w : free_cells) pv[w] = r[w] / diag[w];
        double rz = dot(r, pv);
        for (int64_t it = 0; it < inner_cap && rr > stop2; ++it) {
            apply(pv, Ap);
            double pAp = dot(pv, Ap);
            if (!(pAp > 0)) break;
            double alpha = rz / pAp;
            for (int64_t w : free_cells) {
                x[w] += alpha * pv[w];
                r[w] -= alpha * Ap[w];
            }
            rr = dot(r, r);
            ++total_inner;
            double rz_new = 0;
            for (int64_t w : free_cells) rz_new += r[w] * r[w] / diag[w];
            double beta = rz_new / rz;
            rz = rz_new;
            for (int64_t w : free_cells) pv[w] = r[w] / diag[w] + beta * pv[w];
        }

        // monotone line search on the true energy toward the CG candidate
        double E_new = E;
        bool accepted = false;
        for (double theta : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}) {
            cand = sys.u;
            for (int64_t w : free_cells)
                cand[w] = std::clamp(sys.u[w] + theta * (x[w] - sys.u[w]), 0.0, 1.0);
            double Ec = condenser_energy(sys, cand, p);
            if (Ec < E) {
                E_new = Ec;
                sys.u.swap(cand);
                accepted = true;
                break;
            }
        }
        if (!accepted) break; // stalled: leave certification to the polish

        if (trace) trace->push_back(E_new);
        double rel = (E - E_new) / std::max(E_new, 1e-300);
        E = E_new;
        if (rel < tol) {
            // only declare victory once the regularization has bottomed out
            if (++small_steps >= 2 && floor_rel <= 2e-12) {
                converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    return total_inner;
}

// Projected gradient descent with Armijo backtracking for p != 2, warm
// started from whatever sys.u currently holds.
inline int64_t solve_descent(CondenserSystem& sys, double p, double tol,
                             int64_t max_iters, bool& converged,
                             std::vector<double>* trace) {
    const auto& free_cells = sys.free_cells;
    std::vector<double> grad, cand(sys.u.size());
    double E = condenser_energy(sys, sys.u, p);
    if (trace) trace->push_back(E);
    double step = 1.0;
    int64_t it = 0;
    int small_steps = 0;
    converged = false;
    while (it < max_iters) {
        condenser_gradient(sys, sys.u, p, grad);
        bool accepted = false;
        double E_new = E;
        for (int halve = 0; halve < 60; ++halve) {
            cand = sys.u;
            for (int64_t w : free_cells)
                cand[w] = std::clamp(sys.u[w] - step * grad[w], 0.0, 1.0);
            E_new = condenser_energy(sys, cand, p);
            double decrease = 0;
            for (int64_t w : free_cells) decrease += grad[w] * (sys.u[w] - cand[w]);
            if (E_new <= E - 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) { // no descent direction left: stationary
            converged = true;
            break;
        }
        double rel = (E - E_new) / std::max(E_new, 1e-300);
        sys.u.swap(cand);
        E = E_new;
        ++it;
        step *= 2.0;
        if (trace) trace->push_back(E);
        if (rel < tol) {
            if (++small_steps >= 2) {
                converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    return it;
}

} // namespace detail

inline CapacityResult solve_capacity(const CapacityProblem& prob) {
    if (!prob.grid) throw std::invalid_argument("grid required");
    if (!(prob.p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
    if (!(prob.tol > 0)) throw std::invalid_argument("tolerance must be positive");

    auto sys = detail::build_system(prob);
    const int64_t n_free = (int64_t)sys.free_cells.size();

    CapacityResult res;
    res.window = sys.win;

    int64_t cg_iters = prob.max_iters;
    if (cg_iters <= 0)
        cg_iters = std::max<int64_t>(200, 20 * (int64_t)std::ceil(std::sqrt((double)std::max<int64_t>(n_free, 1))));
    bool cg_ok = true;
    res.iterations = detail::solve_quadratic(sys, std::min(prob.tol, 1e-8), cg_iters, cg_ok);
    res.converged = cg_ok;

    if (prob.p != 2.0) {
        bool irls_ok = false;
        res.iterations += detail::solve_reweighted(sys, prob.p, prob.tol, 40, irls_ok,
                                                   prob.record_trace ? &res.trace : nullptr);
        int64_t gd_iters = prob.max_iters;
        if (gd_iters <= 0)
            gd_iters = std::min<int64_t>(
                100000, 50 * (int64_t)std::ceil(std::sqrt((double)std::max<int64_t>(n_free, 1))));
        bool gd_ok = false;
        res.iterations += detail::solve_descent(sys, prob.p, prob.tol, gd_iters, gd_ok,
                                                prob.record_trace ? &res.trace : nullptr);
        res.converged = cg_ok && gd_ok;
    }

    res.value = detail::condenser_energy(sys, sys.u, prob.p);

    const MetricGrid& g = *prob.grid;
    res.potential.assign(g.cell_count(), 0.0);
    for (int64_t w = 0; w < sys.win.size(); ++w) {
        auto c = detail::wcoords(sys, w);
        res.potential[g.index(c[0] + sys.win.lo[0], c[1] + sys.win.lo[1],
                              c[2] + sys.win.lo[2])] = sys.u[w];
    }
    return res;
}

// ----- reference values -----

inline double sphere_area_constant(int Q) {
    if (Q == 2) return 2.0 * std::numbers::pi;
    if (Q == 3) return 4.0 * std::numbers::pi;
    throw std::invalid_argument("ambient dimension must be 2 or 3");
}

// Continuum p-capacity of the spherical condenser (B(r), B(R)): the extremal
// potential is radial, reducing the minimization to a one-dimensional
// integral evaluated here by adaptive quadrature.
inline double radial_condenser_capacity(double r, double R, double p, int Q) {
    if (!(0 < r && r < R)) throw std::invalid_argument("radii must satisfy 0 < r < R");
    if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
    double omega = sphere_area_constant(Q);
    double beta = double(Q - 1) / (p - 1.0);
    double I = adaptive_simpson([beta](double rho) { return std::pow(rho, -beta); }, r, R);
    return omega * std::pow(I, 1.0 - p);
}

// Energy of the truncated logarithmic cutoff between radii rho < r: an upper
// bound for cap_p(B(rho), B(r)) used by the pointwise capacity estimates.
inline double log_cutoff_upper_bound(double r, double rho, double p, int Q) {
    if (!(0 < rho && rho < r)) throw std::invalid_argument("radii must satisfy 0 < rho < r");
    if (!(p > 0)) throw std::invalid_argument("exponent must be positive");
    double omega = sphere_area_constant(Q);
    double I = adaptive_simpson([&](double t) { return std::pow(t, Q - 1.0 - p); }, rho, r);
    return omega / std::pow(std::log(r / rho), p) * I;
}

} // namespace gridcap
