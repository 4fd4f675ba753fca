#pragma once

// Refinement-trend verdicts.  A single grid value can never witness an
// infimum over all functions or scales, so every holds/fails verdict is a
// statement about the sequence of estimates across a refinement ladder:
//
//   Diverging: total growth over the ladder >= 2x.  Logarithmic-rate
//     divergences (the interesting failures) grow well under 2x per step at
//     desk scales but compound past 2x over a 3-4 level ladder.
//   Vanishing: strictly decreasing at every step and total decay to <= 0.8x.
//   Stable: everything else.

#include <stdexcept>
#include <string>
#include <vector>

namespace gridcap {

enum class Trend { Stable, Diverging, Vanishing };

inline constexpr double kDivergeTotalFactor = 2.0;
inline constexpr double kVanishTotalFactor = 0.8;

inline Trend classify_trend(const std::vector<double>& values) {
    if (values.size() < 2)
        throw std::invalid_argument("trend needs at least two ladder values");
    for (double v : values)
        if (!(v >= 0)) throw std::invalid_argument("trend values must be nonnegative");
    const double first = values.front(), last = values.back();
    if (first == 0) return last > 0 ? Trend::Diverging : Trend::Stable;
    if (last >= kDivergeTotalFactor * first) return Trend::Diverging;
    bool strictly_down = true;
    for (size_t i = 1; i < values.size(); ++i)
        if (!(values[i] < values[i - 1])) strictly_down = false;
    if (strictly_down && last <= kVanishTotalFactor * first) return Trend::Vanishing;
    return Trend::Stable;
}

inline const char* trend_name(Trend t) {
    switch (t) {
    case Trend::Diverging: return "diverging";
    case Trend::Vanishing: return "vanishing";
    default: return "stable";
    }
}

} // namespace gridcap
