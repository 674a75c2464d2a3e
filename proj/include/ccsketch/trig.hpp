#pragma once

#include <cmath>
#include <numbers>

namespace ccsketch::detail {

inline constexpr double pi = std::numbers::pi;

// sin(x) for x in (0, pi); above pi/2 the argument is reflected so that
// values near pi keep their relative precision.
inline double sin_open(double x)
{
    return x > 0.5 * pi ? std::sin(pi - x) : std::sin(x);
}

inline double cot_open(double x)
{
    if (x > 0.5 * pi) {
        const double c = pi - x;
        return -std::cos(c) / std::sin(c);
    }
    return std::cos(x) / std::sin(x);
}

// log( sin((1 - delta) x) / sin x ) for x in (0, pi).
//
// Uses sin(x - dx)/sin x = cos dx - sin dx cot x, so the log1p argument is
// O(delta) when delta is small instead of a difference of two O(1) logs.
inline double log_sin_ratio(double x, double delta)
{
    const double dx = delta * x;
    const double half = std::sin(0.5 * dx);
    return std::log1p(-2.0 * half * half - std::sin(dx) * cot_open(x));
}

} // namespace ccsketch::detail
