#pragma once

#include <cmath>
#include <span>
#include <string_view>

#include "errors.hpp"
#include "sketch.hpp"

namespace ccsketch {

enum class EntropyFamily { renyi, tsallis, shannon_plugin };

constexpr std::string_view to_string(EntropyFamily f)
{
    switch (f) {
    case EntropyFamily::renyi: return "renyi";
    case EntropyFamily::tsallis: return "tsallis";
    case EntropyFamily::shannon_plugin: return "shannon_plugin";
    }
    return "unknown";
}

/// Entropy in nats.
struct EntropyEstimate {
    double value;
    EntropyFamily family;
    double alpha;
};

// The *_gap overloads take delta = 1 - alpha directly; 1 - alpha is never
// recomputed from a rounded alpha near 1.

namespace detail {

inline void validate_moments(double f_alpha, double f1)
{
    if (!(f_alpha > 0.0) || !(f1 > 0.0))
        throw domain_error("entropy needs positive F_alpha and F_1");
}

// log( F_alpha / F_1^alpha )
inline double log_moment_ratio(double f_alpha, double f1, double alpha)
{
    return std::log(f_alpha) - alpha * std::log(f1);
}

} // namespace detail

/// H_alpha = log(F_alpha / F_1^alpha) / (1 - alpha), computed from the gap.
inline double renyi_entropy_gap(double f_alpha, double f1, double delta)
{
    detail::validate_moments(f_alpha, f1);
    if (delta == 0.0 || !std::isfinite(delta))
        throw domain_error("Renyi entropy needs alpha != 1");
    return detail::log_moment_ratio(f_alpha, f1, 1.0 - delta) / delta;
}

inline double renyi_entropy(double f_alpha, double f1, double alpha)
{
    return renyi_entropy_gap(f_alpha, f1, 1.0 - alpha);
}

/// T_alpha = (1 - F_alpha / F_1^alpha) / (alpha - 1), computed from the gap.
inline double tsallis_entropy_gap(double f_alpha, double f1, double delta)
{
    detail::validate_moments(f_alpha, f1);
    if (delta == 0.0 || !std::isfinite(delta))
        throw domain_error("Tsallis entropy needs alpha != 1");
    // (1 - e^r) / (-delta) = expm1(r) / delta
    return std::expm1(detail::log_moment_ratio(f_alpha, f1, 1.0 - delta)) / delta;
}

inline double tsallis_entropy(double f_alpha, double f1, double alpha)
{
    return tsallis_entropy_gap(f_alpha, f1, 1.0 - alpha);
}

/// Plug-in Shannon entropy of a non-negative vector, 0 log 0 = 0.
inline double shannon_exact(std::span<const double> vector)
{
    double total = 0.0;
    for (double a : vector) {
        if (a < 0.0)
            throw domain_error("shannon_exact requires non-negative entries");
        total += a;
    }
    if (!(total > 0.0))
        throw degenerate_input_error("shannon_exact of an all-zero vector");
    // H = log F1 - (1/F1) sum a log a
    double acc = 0.0;
    for (double a : vector)
        if (a > 0.0)
            acc += a * std::log(a);
    const double h = std::log(total) - acc / total;
    return h < 0.0 ? 0.0 : h;
}

/// Shannon entropy approximated by the Renyi or Tsallis entropy at the
/// sketch's alpha = 1 - delta, using the sample-minimum F_alpha and the
/// exact F_1 carried by the sketch.
///
/// Note the gap amplifies estimator noise: the entropy error is
/// log(F_hat / F_alpha) / delta, and F_hat / F_alpha - 1 is itself of order
/// delta log(1/delta). Smaller gaps reduce the bias of H_alpha against H
/// but not this term.
inline EntropyEstimate shannon_from_sketch(const CCSketch& sketch, EntropyFamily family)
{
    const MomentEstimate m = sketch.estimate_moment();
    const double delta = sketch.config().delta;
    switch (family) {
    case EntropyFamily::renyi:
        return {renyi_entropy_gap(m.value, sketch.f1(), delta), family, m.alpha};
    case EntropyFamily::tsallis:
        return {tsallis_entropy_gap(m.value, sketch.f1(), delta), family, m.alpha};
    default:
        throw domain_error("shannon_from_sketch supports the renyi and tsallis families");
    }
}

} // namespace ccsketch
