#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "hash.hpp"
#include "trig.hpp"

namespace ccsketch {

/// Parameters of the maximally skewed stable law S(alpha, beta = 1,
/// cos(pi alpha / 2)) for alpha = 1 - delta < 1.
struct StableParams {
    static constexpr double beta = 1.0;
    static constexpr double rho = 0.5 * detail::pi;

    double delta;
    double alpha;

    explicit StableParams(double gap) : delta(gap), alpha(1.0 - gap)
    {
        validate_gap(gap);
    }
};

/// One (uniform angle, unit exponential) draw feeding the sampler.
struct UniformExpPair {
    double v; // in (0, pi)
    double w; // > 0
};

/// Deterministic pair for entry (i, j) of the projection matrix under `seed`.
/// Pure: the same arguments always give bit-identical output.
inline UniformExpPair derive_pair(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept
{
    static const double below_pi = std::nextafter(detail::pi, 0.0);
    const double u1 = open_unit(counter_hash(seed, i, j, 0));
    const double u2 = open_unit(counter_hash(seed, i, j, 1));
    // pi * u1 can round up to the double nearest pi when u1 is within 2^-54 of 1.
    const double v = std::fmin(detail::pi * u1, below_pi);
    return {v, -std::log(u2)};
}

/// log Z for Z = sin(alpha v) / sin(v)^(1/alpha) * (sin(delta v) / w)^(delta/alpha).
///
/// Rearranged as log(sin(alpha v)/sin v) + (delta/alpha)(log sin(delta v)
/// - log sin v - log w) so that nothing underflows for tiny delta and the
/// O(delta) result is not the difference of two O(1) terms.
inline double log_skewed_stable(const StableParams& params, const UniformExpPair& pair)
{
    if (!(pair.v > 0.0 && pair.v < detail::pi) || !(pair.w > 0.0))
        throw invalid_input_error("sampler pair outside (0, pi) x (0, inf)");
    const double d = params.delta;
    const double v = pair.v;
    const double tail = std::log(std::sin(d * v)) - std::log(detail::sin_open(v)) - std::log(pair.w);
    const double log_z = detail::log_sin_ratio(v, d) + (d / params.alpha) * tail;
    if (!std::isfinite(log_z))
        throw invalid_input_error("non-finite stable variate");
    return log_z;
}

inline double skewed_stable(const StableParams& params, const UniformExpPair& pair)
{
    const double z = std::exp(log_skewed_stable(params, pair));
    if (!(z > 0.0) || !std::isfinite(z))
        throw invalid_input_error("stable variate not representable");
    return z;
}

/// Weight r_ij of the (never materialized) D x k projection matrix.
inline double projection_weight(const SketchConfig& config, std::uint64_t i, std::uint64_t j)
{
    if (j >= config.k)
        throw index_error("sample index " + std::to_string(j) + " out of range for k = " +
                          std::to_string(config.k));
    return skewed_stable(StableParams(config.delta), derive_pair(config.seed, i, j));
}

} // namespace ccsketch
