#pragma once

// Report assembly: every JSON report carries a _meta block with the config
// hash and module versions so outputs are traceable to their inputs.  All
// file writing goes through helpers that keep outputs byte-stable (no
// timestamps, locale-independent numbers).

#include "config.hpp"
#include "util.hpp"
#include "version.hpp"

#include <filesystem>
#include <fstream>

namespace gridcap {

inline json meta_block(const std::string& config_text) {
    const auto& mv = module_versions();
    json meta;
    meta["config_hash"] = fnv1a64_hex(config_text);
    meta["library"] = std::string(kLibraryVersion);
    json mods;
    mods["grid"] = std::string(mv.grid);
    mods["cover"] = std::string(mv.cover);
    mods["capacity"] = std::string(mv.capacity);
    mods["fatness"] = std::string(mv.fatness);
    mods["perfectness"] = std::string(mv.perfectness);
    mods["hardy"] = std::string(mv.hardy);
    mods["cli"] = std::string(mv.cli);
    meta["modules"] = mods;
    return meta;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline void write_json_report(const std::filesystem::path& path, const json& report) {
    write_text_file(path, report.dump(2) + "\n");
}

// Two-column numeric series for plotting; header line starts with '#'.
inline void write_plot_data(const std::filesystem::path& path, const std::string& xlabel,
                            const std::string& ylabel,
                            const std::vector<std::pair<double, double>>& rows) {
    std::string out = "# " + xlabel + " " + ylabel + "\n";
    for (const auto& [x, y] : rows)
        out += format_double(x) + " " + format_double(y) + "\n";
    write_text_file(path, out);
}

} // namespace gridcap
