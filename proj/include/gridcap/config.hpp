#pragma once

// JSON experiment configuration: the structured-text schema for domain
// specifications, space parameters and per-command options.  The full schema
// is documented in the repository README; shape nodes look like
//
//   {"type": "disk", "center": [0,0], "radius": 1}
//   {"type": "difference", "a": {...}, "b": {...}}
//
// and a config wraps a command name, a space block, a domain block and
// command-specific options.

#include "geometry.hpp"
#include "grid.hpp"

#include <json.hpp>

#include <string>

namespace gridcap {

using json = nlohmann::ordered_json;

inline Point parse_point(const json& j) {
    if (!j.is_array() || j.size() < 2 || j.size() > 3)
        throw std::runtime_error("point must be an array of 2 or 3 numbers");
    Point p{0, 0, 0};
    for (size_t a = 0; a < j.size(); ++a) p[a] = j[a].get<double>();
    return p;
}

inline ShapeNodePtr parse_shape(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::runtime_error("shape needs a type field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "disk")
        return make_disk(parse_point(j.at("center")), j.at("radius").get<double>());
    if (type == "box")
        return make_box(parse_point(j.at("lo")), parse_point(j.at("hi")));
    if (type == "half_space")
        return make_half_space(parse_point(j.at("normal")), j.at("offset").get<double>());
    if (type == "annulus")
        return make_annulus(parse_point(j.at("center")), j.at("r_inner").get<double>(),
                            j.at("r_outer").get<double>());
    if (type == "punctured_disk")
        return make_punctured_disk(parse_point(j.at("center")), j.at("radius").get<double>(),
                                   parse_point(j.at("puncture")));
    if (type == "segment")
        return make_segment(parse_point(j.at("a")), parse_point(j.at("b")));
    if (type == "cantor")
        return make_cantor_line(parse_point(j.at("a")), parse_point(j.at("b")),
                                j.value("theta", 1.0 / 3.0), j.value("depth", -1));
    if (type == "union") {
        std::vector<ShapeNodePtr> children;
        for (const auto& c : j.at("shapes")) children.push_back(parse_shape(c));
        return make_union(std::move(children));
    }
    if (type == "difference")
        return make_difference(parse_shape(j.at("a")), parse_shape(j.at("b")));
    throw std::runtime_error("unknown shape type: " + type);
}

inline SpaceParams parse_space(const json& j) {
    SpaceParams sp;
    sp.Q = j.value("Q", 2);
    sp.c_A = j.value("c_A", 3.14159265358979323846);
    sp.h = j.at("h").get<double>();
    const auto& bb = j.at("bbox");
    sp.bbox.lo = parse_point(bb.at(0));
    sp.bbox.hi = parse_point(bb.at(1));
    return sp;
}

inline std::shared_ptr<const DomainSpec> parse_domain(const json& j) {
    auto spec = std::make_shared<DomainSpec>();
    spec->name = j.value("name", std::string());
    spec->root = parse_shape(j.at("shape"));
    return spec;
}

// Mask spec: a shape rasterized over the grid, optionally intersected with
// the domain: {"shape": {...}, "intersect_domain": true}
inline SetMask parse_mask(const json& j, const MetricGrid& g, const char* what) {
    ShapeNodePtr shape = parse_shape(j.at("shape"));
    bool intersect = j.value("intersect_domain", false);
    std::vector<uint8_t> bits(g.cell_count(), 0);
    detail::rasterize_node(g, *shape, bits);
    std::vector<int64_t> cells;
    for (int64_t i = 0; i < g.cell_count(); ++i)
        if (bits[i] && (!intersect || g.domain[i])) cells.push_back(i);
    return finalize_mask(std::move(cells), what);
}

struct ExperimentConfig {
    std::string command;
    SpaceParams space;
    std::shared_ptr<const DomainSpec> domain;
    json raw;        // full config for command-specific fields
    std::string text; // raw file contents (hashed into reports)
};

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.text = text;
    cfg.raw = json::parse(text);
    cfg.command = cfg.raw.at("command").get<std::string>();
    cfg.space = parse_space(cfg.raw.at("space"));
    cfg.domain = parse_domain(cfg.raw.at("domain"));
    return cfg;
}

} // namespace gridcap
