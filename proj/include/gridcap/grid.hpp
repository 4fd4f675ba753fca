#pragma once

// Metric measure grid: uniform cell discretization of a bounded box in
// R^Q (Q = 2 or 3) together with the domain indicator and the exact
// Euclidean distance from each domain cell center to the nearest
// complement cell center.
//
// Conventions
//   * cell (i,j,k) covers [lo + i*h, lo + (i+1)*h) per axis; its center is
//     lo + (i + 1/2) h
//   * linear index = (k*n1 + j)*n0 + i
//   * solid shapes are rasterized by center sampling; thin shapes mark every
//     cell their carrier segment passes through
//   * dist is 0 on complement cells and exactly h * |Delta index| in the
//     Euclidean index metric otherwise, so it is 1-Lipschitz (constant h)
//     across face-neighbor cells

#include "geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "util.hpp"

namespace gridcap {

struct SpaceParams {
    int Q = 2;          // ambient dimension
    double c_A = 3.14159265358979323846; // measure density constant: mu(B(x,r)) ~ c_A r^Q
    double h = 0.0;     // cell side
    BBox bbox;          // grid extent
};

class MetricGrid {
public:
    SpaceParams params;
    std::array<int64_t, 3> n{1, 1, 1};
    std::vector<uint8_t> domain;            // 1 = inside domain
    std::vector<double> dist;               // distance to complement, 0 outside
    std::shared_ptr<const DomainSpec> spec; // kept for refinement ladders

    int64_t cell_count() const { return n[0] * n[1] * n[2]; }
    double cell_volume() const {
        double v = 1;
        for (int a = 0; a < params.Q; ++a) v *= params.h;
        return v;
    }

    int64_t index(int64_t i, int64_t j, int64_t k) const {
        return (k * n[1] + j) * n[0] + i;
    }
    std::array<int64_t, 3> coords(int64_t idx) const {
        int64_t i = idx % n[0];
        int64_t j = (idx / n[0]) % n[1];
        int64_t k = idx / (n[0] * n[1]);
        return {i, j, k};
    }
    bool in_bounds(int64_t i, int64_t j, int64_t k) const {
        return i >= 0 && i < n[0] && j >= 0 && j < n[1] && k >= 0 && k < n[2];
    }

    Point cell_center(int64_t idx) const {
        auto c = coords(idx);
        Point p = params.bbox.lo;
        p[0] += (double(c[0]) + 0.5) * params.h;
        p[1] += (double(c[1]) + 0.5) * params.h;
        p[2] = params.Q == 3 ? p[2] + (double(c[2]) + 0.5) * params.h : 0.0;
        return p;
    }

    // Cell whose half-open extent contains x (clamped to the grid).
    std::array<int64_t, 3> containing_coords(const Point& x) const {
        std::array<int64_t, 3> c{0, 0, 0};
        for (int a = 0; a < params.Q; ++a) {
            auto i = (int64_t)std::floor((x[a] - params.bbox.lo[a]) / params.h);
            c[a] = std::clamp<int64_t>(i, 0, n[a] - 1);
        }
        return c;
    }
    int64_t containing_cell(const Point& x) const {
        auto c = containing_coords(x);
        return index(c[0], c[1], c[2]);
    }

    double domain_measure() const {
        int64_t cnt = 0;
        for (uint8_t d : domain) cnt += d;
        return double(cnt) * cell_volume();
    }
};

// ----- thin-shape cell marching -----

// Marks every cell the segment [a,b] passes through (Amanatides-Woo grid
// traversal).  Points on a grid line belong to the higher-index cell, which
// matches the half-open cell extents.
template <class Mark>
inline void march_segment(const MetricGrid& g, const Point& a, const Point& b, Mark&& mark) {
    const int Q = g.params.Q;
    const double h = g.params.h;
    auto cur = g.containing_coords(a);
    const auto end = g.containing_coords(b);

    std::array<int64_t, 3> step{0, 0, 0};
    std::array<double, 3> t_max, t_delta;
    t_max.fill(std::numeric_limits<double>::infinity());
    t_delta.fill(std::numeric_limits<double>::infinity());
    double len = dist(a, b);
    if (len == 0) {
        mark(g.index(cur[0], cur[1], cur[2]));
        return;
    }
    for (int ax = 0; ax < Q; ++ax) {
        double d = b[ax] - a[ax];
        if (d == 0) continue;
        step[ax] = d > 0 ? 1 : -1;
        double edge = g.params.bbox.lo[ax] + (double(cur[ax]) + (d > 0 ? 1.0 : 0.0)) * h;
        t_max[ax] = (edge - a[ax]) / d;
        t_delta[ax] = h / std::abs(d);
    }
    mark(g.index(cur[0], cur[1], cur[2]));
    const int64_t guard = 4 * (g.n[0] + g.n[1] + g.n[2]) + 16;
    for (int64_t it = 0; it < guard; ++it) {
        if (cur == end) return;
        int ax = 0;
        for (int a2 = 1; a2 < Q; ++a2)
            if (t_max[a2] < t_max[ax]) ax = a2;
        if (t_max[ax] > 1.0) return; // next crossing is past the segment end
        cur[ax] += step[ax];
        if (cur[ax] < 0 || cur[ax] >= g.n[ax]) return;
        t_max[ax] += t_delta[ax];
        mark(g.index(cur[0], cur[1], cur[2]));
    }
}

// ----- rasterization -----

namespace detail {

inline void rasterize_node(const MetricGrid& g, const ShapeNode& node,
                           std::vector<uint8_t>& out);

inline std::vector<uint8_t> rasterize_child(const MetricGrid& g, const ShapeNode& node) {
    std::vector<uint8_t> bits(g.cell_count(), 0);
    rasterize_node(g, node, bits);
    return bits;
}

// Deepest cantor depth whose intervals still span at least one cell.
inline int auto_cantor_depth(const CantorLine& c, double seg_len, double h) {
    int d = 0;
    double len = seg_len;
    while (len * c.theta >= h) {
        len *= c.theta;
        ++d;
    }
    return d;
}

inline void rasterize_node(const MetricGrid& g, const ShapeNode& node,
                           std::vector<uint8_t>& out) {
    using K = ShapeNode::Kind;
    const int Q = g.params.Q;
    switch (node.kind) {
    case K::Disk:
    case K::Box:
    case K::HalfSpace:
    case K::Annulus: {
        const int64_t N = g.cell_count();
        for (int64_t idx = 0; idx < N; ++idx)
            if (solid_contains(node, g.cell_center(idx), Q)) out[idx] = 1;
        break;
    }
    case K::PuncturedDisk: {
        const int64_t N = g.cell_count();
        for (int64_t idx = 0; idx < N; ++idx)
            if (solid_contains(node, g.cell_center(idx), Q)) out[idx] = 1;
        out[g.containing_cell(node.punctured.puncture)] = 0;
        break;
    }
    case K::Segment:
        march_segment(g, node.segment.a, node.segment.b,
                      [&](int64_t idx) { out[idx] = 1; });
        break;
    case K::CantorLine: {
        const auto& c = node.cantor;
        double seg_len = dist(c.a, c.b);
        int depth = c.depth;
        if (depth < 0) depth = auto_cantor_depth(c, seg_len, g.params.h);
        if (seg_len * std::pow(c.theta, depth) < g.params.h)
            throw std::runtime_error("resolution exhausted");
        for (const auto& iv : cantor_intervals(c.theta, depth)) {
            Point pa, pb;
            for (int a = 0; a < 3; ++a) {
                pa[a] = c.a[a] + iv[0] * (c.b[a] - c.a[a]);
                pb[a] = c.a[a] + iv[1] * (c.b[a] - c.a[a]);
            }
            march_segment(g, pa, pb, [&](int64_t idx) { out[idx] = 1; });
        }
        break;
    }
    case K::Union: {
        for (const auto& ch : node.children) {
            auto bits = rasterize_child(g, *ch);
            for (size_t i = 0; i < bits.size(); ++i) out[i] |= bits[i];
        }
        break;
    }
    case K::Difference: {
        if (node.children.size() != 2)
            throw std::invalid_argument("difference node needs two children");
        auto a = rasterize_child(g, *node.children[0]);
        auto b = rasterize_child(g, *node.children[1]);
        for (size_t i = 0; i < a.size(); ++i) out[i] |= (a[i] & uint8_t(1u - b[i]));
        break;
    }
    }
}

// Pseudo-infinity for unseeded cells.  Large enough to dominate any real
// squared distance, small enough that parabola intersections stay finite.
constexpr double kEdtBig = 1e15;

// Felzenszwalb-Huttenlocher 1-D squared distance transform along one line.
inline void edt_line(const std::vector<double>& f, std::vector<double>& d,
                     std::vector<int>& v, std::vector<double>& z, int64_t m) {
    int k = 0;
    v[0] = 0;
    z[0] = -kEdtBig;
    z[1] = kEdtBig;
    for (int q = 1; q < m; ++q) {
        double s = 0;
        while (true) {
            int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kEdtBig;
    }
    k = 0;
    for (int q = 0; q < m; ++q) {
        while (z[k + 1] < double(q)) ++k;
        double dq = double(q) - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

// Exact squared Euclidean distance (in cell units) to the nearest seed cell,
// separable pass per axis.
inline std::vector<double> edt_squared(const MetricGrid& g, const std::vector<uint8_t>& seed) {
    const int64_t N = g.cell_count();
    std::vector<double> d2(N);
    for (int64_t i = 0; i < N; ++i) d2[i] = seed[i] ? 0.0 : kEdtBig;

    int64_t mmax = std::max({g.n[0], g.n[1], g.n[2]});
    std::vector<double> f(mmax), dline(mmax), z(mmax + 1);
    std::vector<int> v(mmax);

    for (int axis = 0; axis < g.params.Q; ++axis) {
        const int64_t m = g.n[axis];
        if (m == 1) continue;
        std::array<int64_t, 3> stride_of{1, g.n[0], g.n[0] * g.n[1]};
        const int64_t stride = stride_of[axis];
        // iterate all lines along `axis`
        std::array<int64_t, 3> lim = g.n;
        lim[axis] = 1;
        for (int64_t k = 0; k < lim[2]; ++k)
            for (int64_t j = 0; j < lim[1]; ++j)
                for (int64_t i = 0; i < lim[0]; ++i) {
                    int64_t base = g.index(i, j, k);
                    for (int64_t q = 0; q < m; ++q) f[q] = d2[base + q * stride];
                    edt_line(f, dline, v, z, m);
                    for (int64_t q = 0; q < m; ++q) d2[base + q * stride] = dline[q];
                }
    }
    return d2;
}

} // namespace detail

// Builds the grid for a domain specification.  Throws "degenerate domain"
// when no cell lands inside the domain, and "complement required" when no
// cell lands outside it (the distance function would be undefined).
inline MetricGrid build_grid(std::shared_ptr<const DomainSpec> spec, const SpaceParams& params) {
    if (params.Q != 2 && params.Q != 3)
        throw std::invalid_argument("ambient dimension must be 2 or 3");
    if (!(params.h > 0)) throw std::invalid_argument("cell side must be positive");
    if (!(params.c_A > 0)) throw std::invalid_argument("density constant must be positive");
    if (!spec || !spec->root) throw std::invalid_argument("domain spec required");

    MetricGrid g;
    g.params = params;
    g.spec = std::move(spec);
    for (int a = 0; a < params.Q; ++a) {
        double side = params.bbox.side(a);
        if (!(side > 0)) throw std::invalid_argument("bounding box must have positive extent");
        g.n[a] = std::max<int64_t>(1, (int64_t)std::llround(side / params.h));
    }

    g.domain.assign(g.cell_count(), 0);
    detail::rasterize_node(g, *g.spec->root, g.domain);

    int64_t inside = 0;
    for (uint8_t d : g.domain) inside += d;
    if (inside == 0) throw std::runtime_error("degenerate domain");
    if (inside == g.cell_count()) throw std::runtime_error("complement required");

    std::vector<uint8_t> seed(g.cell_count());
    for (int64_t i = 0; i < g.cell_count(); ++i) seed[i] = g.domain[i] ? 0 : 1;
    auto d2 = detail::edt_squared(g, seed);
    g.dist.resize(g.cell_count());
    for (int64_t i = 0; i < g.cell_count(); ++i)
        g.dist[i] = g.domain[i] ? params.h * std::sqrt(d2[i]) : 0.0;
    return g;
}

inline MetricGrid build_grid(const DomainSpec& spec, const SpaceParams& params) {
    return build_grid(std::make_shared<const DomainSpec>(spec), params);
}

// Same domain at half the cell side (one refinement step).
inline MetricGrid refine(const MetricGrid& g) {
    SpaceParams p = g.params;
    p.h *= 0.5;
    return build_grid(g.spec, p);
}

// ----- cell sets -----

// A set of grid cells (sorted linear indices) used for plates, covers and
// measure targets.
struct SetMask {
    std::vector<int64_t> cells;

    bool contains(int64_t idx) const {
        return std::binary_search(cells.begin(), cells.end(), idx);
    }
    int64_t size() const { return (int64_t)cells.size(); }
};

inline SetMask finalize_mask(std::vector<int64_t> cells, const char* what) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (cells.empty())
        throw std::runtime_error(std::string("empty mask: ") + what);
    return SetMask{std::move(cells)};
}

template <class Pred>
inline SetMask mask_from_predicate(const MetricGrid& g, Pred&& pred, const char* what) {
    std::vector<int64_t> cells;
    const int64_t N = g.cell_count();
    for (int64_t idx = 0; idx < N; ++idx)
        if (pred(idx)) cells.push_back(idx);
    return finalize_mask(std::move(cells), what);
}

inline SetMask ball_mask(const MetricGrid& g, const Point& center, double radius) {
    return mask_from_predicate(g, [&](int64_t idx) {
        Point c = g.cell_center(idx);
        double d2 = 0;
        for (int a = 0; a < g.params.Q; ++a) {
            double t = c[a] - center[a];
            d2 += t * t;
        }
        return d2 < radius * radius;
    }, "ball");
}

inline SetMask annulus_mask(const MetricGrid& g, const Point& center,
                            double r_inner, double r_outer) {
    return mask_from_predicate(g, [&](int64_t idx) {
        Point c = g.cell_center(idx);
        double d2 = 0;
        for (int a = 0; a < g.params.Q; ++a) {
            double t = c[a] - center[a];
            d2 += t * t;
        }
        return d2 > r_inner * r_inner && d2 < r_outer * r_outer;
    }, "annulus");
}

inline SetMask box_mask(const MetricGrid& g, const Point& lo, const Point& hi) {
    return mask_from_predicate(g, [&](int64_t idx) {
        Point c = g.cell_center(idx);
        for (int a = 0; a < g.params.Q; ++a)
            if (!(c[a] > lo[a] && c[a] < hi[a])) return false;
        return true;
    }, "box");
}

inline SetMask segment_mask(const MetricGrid& g, const Point& a, const Point& b) {
    std::vector<int64_t> cells;
    march_segment(g, a, b, [&](int64_t idx) { cells.push_back(idx); });
    return finalize_mask(std::move(cells), "segment");
}

inline SetMask cantor_mask(const MetricGrid& g, const CantorLine& c) {
    double seg_len = dist(c.a, c.b);
    int depth = c.depth;
    if (depth < 0) depth = detail::auto_cantor_depth(c, seg_len, g.params.h);
    if (seg_len * std::pow(c.theta, depth) < g.params.h)
        throw std::runtime_error("resolution exhausted");
    std::vector<int64_t> cells;
    for (const auto& iv : cantor_intervals(c.theta, depth)) {
        Point pa, pb;
        for (int a = 0; a < 3; ++a) {
            pa[a] = c.a[a] + iv[0] * (c.b[a] - c.a[a]);
            pb[a] = c.a[a] + iv[1] * (c.b[a] - c.a[a]);
        }
        march_segment(g, pa, pb, [&](int64_t idx) { cells.push_back(idx); });
    }
    return finalize_mask(std::move(cells), "cantor");
}

// Cells of the grid complement (not in the domain).
inline SetMask complement_mask(const MetricGrid& g) {
    return mask_from_predicate(g, [&](int64_t idx) { return g.domain[idx] == 0; },
                               "complement");
}

inline double mask_measure(const MetricGrid& g, const SetMask& m) {
    return double(m.size()) * g.cell_volume();
}

// ----- export / import -----

// Text header followed by raw little-endian payload: first the domain
// indicator (u8 per cell), then the distance field (f64 per cell).
inline void write_grid(std::ostream& os, const MetricGrid& g) {
    os << "metric-grid 1\n";
    os << "Q " << g.params.Q << "\n";
    os << "h " << format_double(g.params.h) << "\n";
    os << "c_A " << format_double(g.params.c_A) << "\n";
    os << "bbox";
    for (int a = 0; a < 3; ++a) os << " " << format_double(g.params.bbox.lo[a]);
    for (int a = 0; a < 3; ++a) os << " " << format_double(g.params.bbox.hi[a]);
    os << "\n";
    os << "cells " << g.n[0] << " " << g.n[1] << " " << g.n[2] << "\n";
    os << "payload domain:u8 dist:f64\n";
    os.write(reinterpret_cast<const char*>(g.domain.data()), g.domain.size());
    os.write(reinterpret_cast<const char*>(g.dist.data()),
             (std::streamsize)(g.dist.size() * sizeof(double)));
}

inline MetricGrid read_grid(std::istream& is) {
    MetricGrid g;
    std::string tok;
    int version = 0;
    is >> tok >> version;
    if (tok != "metric-grid" || version != 1)
        throw std::runtime_error("unrecognized grid payload");
    is >> tok >> g.params.Q;
    is >> tok >> g.params.h;
    is >> tok >> g.params.c_A;
    is >> tok;
    for (int a = 0; a < 3; ++a) is >> g.params.bbox.lo[a];
    for (int a = 0; a < 3; ++a) is >> g.params.bbox.hi[a];
    is >> tok >> g.n[0] >> g.n[1] >> g.n[2];
    is >> tok >> tok >> tok; // payload descriptor
    is.ignore(1);            // newline before the binary section
    g.domain.resize(g.cell_count());
    g.dist.resize(g.cell_count());
    is.read(reinterpret_cast<char*>(g.domain.data()), g.domain.size());
    is.read(reinterpret_cast<char*>(g.dist.data()),
            (std::streamsize)(g.dist.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated grid payload");
    return g;
}

} // namespace gridcap
