#pragma once

// Domain geometry: points, boxes, shape primitives and the boolean shape
// tree used to rasterize computational domains.
//
// Two kinds of primitive exist.  Solid shapes (disk, box, half-space,
// annulus, punctured disk) have interior volume and are rasterized by
// sampling cell centers.  Thin shapes (segment, cantor line) have measure
// zero; they are rasterized by marking every cell the curve passes through.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridcap {

using Point = std::array<double, 3>; // third component ignored when Q = 2

inline double dist2(const Point& a, const Point& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

// Distance using only the first Q coordinates.
inline double dist_q(const Point& a, const Point& b, int Q) {
    double s = 0;
    for (int ax = 0; ax < Q; ++ax) {
        double t = a[ax] - b[ax];
        s += t * t;
    }
    return std::sqrt(s);
}

// Deterministic farthest-point subsample: start at index 0, repeatedly add
// the point farthest from the chosen set (ties to the lower index).  Spreads
// samples over the set and picks isolated outliers early.
inline std::vector<std::int64_t> farthest_point_sample(const std::vector<Point>& pts,
                                                       int Q, std::int64_t count) {
    std::vector<std::int64_t> chosen;
    if (pts.empty() || count <= 0) return chosen;
    count = std::min<std::int64_t>(count, (std::int64_t)pts.size());
    std::vector<double> min_d(pts.size(), std::numeric_limits<double>::infinity());
    std::int64_t cur = 0;
    chosen.push_back(cur);
    while ((std::int64_t)chosen.size() < count) {
        std::int64_t best = -1;
        double best_d = -1;
        for (std::int64_t i = 0; i < (std::int64_t)pts.size(); ++i) {
            min_d[i] = std::min(min_d[i], dist_q(pts[i], pts[cur], Q));
            if (min_d[i] > best_d) {
                best_d = min_d[i];
                best = i;
            }
        }
        if (best < 0 || best_d <= 0) break; // all remaining points coincide
        chosen.push_back(best);
        cur = best;
    }
    return chosen;
}

struct BBox {
    Point lo{0, 0, 0};
    Point hi{0, 0, 0};

    double side(int axis) const { return hi[axis] - lo[axis]; }
    double min_side(int Q) const {
        double s = side(0);
        for (int a = 1; a < Q; ++a) s = std::min(s, side(a));
        return s;
    }
    bool contains(const Point& x, int Q) const {
        for (int a = 0; a < Q; ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }
};

// ----- primitives -----

struct Disk {           // open ball, any dimension
    Point center{0, 0, 0};
    double radius = 0;
};

struct Box {            // open axis-aligned box
    Point lo{0, 0, 0};
    Point hi{0, 0, 0};
};

struct HalfSpace {      // { x : n.x < offset }
    Point normal{0, 0, 0};
    double offset = 0;
};

struct Annulus {        // { x : r_inner < |x-c| < r_outer }
    Point center{0, 0, 0};
    double r_inner = 0;
    double r_outer = 0;
};

struct PuncturedDisk {  // open ball minus the single grid cell containing the puncture
    Point center{0, 0, 0};
    double radius = 0;
    Point puncture{0, 0, 0};
};

struct Segment {        // thin: the straight segment from a to b
    Point a{0, 0, 0};
    Point b{0, 0, 0};
};

// Thin Cantor set along the segment [a,b]: 2^depth intervals, each of
// length theta^depth * |b-a|.  theta is the per-level scaling ratio; the
// removed middle fraction is 1 - 2*theta, so theta must lie in (0, 1/2).
struct CantorLine {
    Point a{0, 0, 0};
    Point b{0, 0, 0};
    double theta = 1.0 / 3.0;
    int depth = 0;
};

// Sub-intervals of the Cantor construction as (start, end) parameters in
// [0,1] along the carrier segment.
inline std::vector<std::array<double, 2>> cantor_intervals(double theta, int depth) {
    if (!(theta > 0.0 && theta < 0.5))
        throw std::invalid_argument("cantor ratio must lie in (0, 1/2)");
    if (depth < 0) throw std::invalid_argument("cantor depth must be nonnegative");
    std::vector<std::array<double, 2>> cur{{0.0, 1.0}};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::array<double, 2>> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            double len = iv[1] - iv[0];
            next.push_back({iv[0], iv[0] + theta * len});
            next.push_back({iv[1] - theta * len, iv[1]});
        }
        cur = std::move(next);
    }
    return cur;
}

// ----- shape tree -----

struct ShapeNode;
using ShapeNodePtr = std::shared_ptr<const ShapeNode>;

struct ShapeNode {
    enum class Kind {
        Disk, Box, HalfSpace, Annulus, PuncturedDisk, Segment, CantorLine,
        Union, Difference
    };

    Kind kind;
    // primitive payload (only one is meaningful, selected by kind)
    Disk disk;
    Box box;
    HalfSpace half_space;
    Annulus annulus;
    PuncturedDisk punctured;
    Segment segment;
    CantorLine cantor;
    // children for Union (any count) and Difference (exactly two: a minus b)
    std::vector<ShapeNodePtr> children;

    bool is_thin() const {
        return kind == Kind::Segment || kind == Kind::CantorLine;
    }
};

struct DomainSpec {
    ShapeNodePtr root;
    std::string name; // optional fixture label carried into reports
};

inline ShapeNodePtr make_disk(Point c, double r) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Disk;
    n->disk = Disk{c, r};
    return n;
}

inline ShapeNodePtr make_box(Point lo, Point hi) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Box;
    n->box = Box{lo, hi};
    return n;
}

inline ShapeNodePtr make_half_space(Point normal, double offset) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::HalfSpace;
    n->half_space = HalfSpace{normal, offset};
    return n;
}

inline ShapeNodePtr make_annulus(Point c, double r_inner, double r_outer) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Annulus;
    n->annulus = Annulus{c, r_inner, r_outer};
    return n;
}

inline ShapeNodePtr make_punctured_disk(Point c, double r, Point puncture) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::PuncturedDisk;
    n->punctured = PuncturedDisk{c, r, puncture};
    return n;
}

inline ShapeNodePtr make_segment(Point a, Point b) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Segment;
    n->segment = Segment{a, b};
    return n;
}

inline ShapeNodePtr make_cantor_line(Point a, Point b, double theta, int depth) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::CantorLine;
    n->cantor = CantorLine{a, b, theta, depth};
    return n;
}

inline ShapeNodePtr make_union(std::vector<ShapeNodePtr> children) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Union;
    n->children = std::move(children);
    return n;
}

inline ShapeNodePtr make_difference(ShapeNodePtr a, ShapeNodePtr b) {
    auto n = std::make_shared<ShapeNode>();
    n->kind = ShapeNode::Kind::Difference;
    n->children = {std::move(a), std::move(b)};
    return n;
}

// Point-membership for solid primitives.  Thin primitives return false here;
// the rasterizer handles them by cell marching.
inline bool solid_contains(const ShapeNode& node, const Point& x, int Q) {
    using K = ShapeNode::Kind;
    switch (node.kind) {
    case K::Disk: {
        double d2 = 0;
        for (int a = 0; a < Q; ++a) {
            double t = x[a] - node.disk.center[a];
            d2 += t * t;
        }
        return d2 < node.disk.radius * node.disk.radius;
    }
    case K::Box: {
        for (int a = 0; a < Q; ++a)
            if (!(x[a] > node.box.lo[a] && x[a] < node.box.hi[a])) return false;
        return true;
    }
    case K::HalfSpace: {
        double s = 0;
        for (int a = 0; a < Q; ++a) s += node.half_space.normal[a] * x[a];
        return s < node.half_space.offset;
    }
    case K::Annulus: {
        double d2 = 0;
        for (int a = 0; a < Q; ++a) {
            double t = x[a] - node.annulus.center[a];
            d2 += t * t;
        }
        return d2 > node.annulus.r_inner * node.annulus.r_inner &&
               d2 < node.annulus.r_outer * node.annulus.r_outer;
    }
    case K::PuncturedDisk: {
        double d2 = 0;
        for (int a = 0; a < Q; ++a) {
            double t = x[a] - node.punctured.center[a];
            d2 += t * t;
        }
        return d2 < node.punctured.radius * node.punctured.radius;
    }
    default:
        return false;
    }
}

} // namespace gridcap
