#pragma once

#include <string_view>

namespace gridcap {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

// Per-module versions, embedded in every report for provenance.
struct ModuleVersions {
    std::string_view grid        = "0.1.0";
    std::string_view cover       = "0.1.0";
    std::string_view capacity    = "0.1.0";
    std::string_view fatness     = "0.1.0";
    std::string_view perfectness = "0.1.0";
    std::string_view hardy       = "0.1.0";
    std::string_view cli         = "0.1.0";
};

inline const ModuleVersions& module_versions() {
    static const ModuleVersions v;
    return v;
}

} // namespace gridcap
