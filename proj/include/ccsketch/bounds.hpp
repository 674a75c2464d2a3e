#pragma once

// Analytic side of the sample-minimum estimator: the CDF kernel g(theta;
// delta), the stable CDF as a one-dimensional integral, the right/left tail
// bounds, the sample-size planner and the angles theta_gamma used when the
// right bound is built by the trapezoid rule.
//
// Quantities such as (1 + eps)^(1/delta) overflow any hardware float once
// delta is around 1e-6, so everything here is carried as a logarithm. The
// O(delta^2) / O(delta) remainders of the asymptotic formulas are dropped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "config.hpp"
#include "errors.hpp"
#include "trig.hpp"

namespace ccsketch {

/// (epsilon, fail_prob, delta) plus the sample count used when evaluating
/// bounds. fail_prob is the planner's failure probability.
struct BoundQuery {
    double epsilon;
    double fail_prob = 0.5;
    double delta;
    std::uint32_t k = 1;
};

/// theta_gamma solves g(theta; delta) / (1 + eps)^(1/delta) = delta^gamma.
struct ThetaQuery {
    double gamma;
    double epsilon;
    double delta;
};

struct LeftTailBound {
    double value;
    // log of E = delta alpha^(1/delta - 1) / (1 - eps)^(1/delta)
    double log_exponent;
    // E > 700: the bound is reported as exactly 0 instead of a subnormal.
    bool underflow;
};

struct SamplePlan {
    double k;
    std::uint64_t k_ceil;
};

namespace detail {

inline void validate_epsilon(double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw domain_error("epsilon must be a positive finite number");
}

inline std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace detail

namespace detail {

// log g at theta in (0, pi/2].
inline double log_g_lower(double theta, double delta)
{
    const double log_ratio = log_sin_ratio(theta, delta);
    return (1.0 / delta - 1.0) * log_ratio + std::log(std::sin(delta * theta)) - std::log(std::sin(theta));
}

// log g at theta = pi - s for s in (0, pi/2]. Taking s as the argument keeps
// full relative precision where g blows up near pi.
inline double log_g_upper(double s, double delta)
{
    const double dx = delta * (pi - s);
    const double half = std::sin(0.5 * dx);
    // cot(pi - s) = -cot s
    const double log_ratio = std::log1p(-2.0 * half * half + std::sin(dx) * std::cos(s) / std::sin(s));
    return (1.0 / delta - 1.0) * log_ratio + std::log(std::sin(dx)) - std::log(std::sin(s));
}

} // namespace detail

/// log g(theta; delta) where
///
///   g = sin(alpha theta)^(alpha/delta) sin(delta theta) / sin(theta)^(1/delta)
///     = sin(delta theta)/sin(alpha theta) * [sin(alpha theta)/sin theta]^(1/delta).
///
/// g is increasing and convex on (0, pi) for delta < 0.5, with
/// g(0+) = delta alpha^(1/delta - 1) and g -> inf at pi.
inline double log_g(double theta, double delta)
{
    if (!(theta > 0.0 && theta < detail::pi))
        throw domain_error("theta must lie strictly inside (0, pi)");
    validate_gap(delta);
    return theta > 0.5 * detail::pi ? detail::log_g_upper(detail::pi - theta, delta)
                                    : detail::log_g_lower(theta, delta);
}

namespace detail {

inline constexpr double theta_lo = 1e-9;
inline constexpr double theta_hi = pi - 1e-9;

struct Bracket {
    double lo;
    double hi;
};

// Narrows [lo, hi] around log_g(theta) = target until the midpoint no longer
// separates the endpoints or `max_iter` is spent. Assumes
// log_g(lo) <= target <= log_g(hi).
inline Bracket bisect_log_g(double target, double delta, double lo, double hi, int max_iter)
{
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            break;
        if (log_g(mid, delta) < target)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

// Integral over u in (0, pi/2] of exp(-exp(h(u) - shift)) for monotone h.
// Pieces are cut where h crosses shift + level; a piece lying entirely
// below x = -36 contributes its width, one above x = 4 contributes nothing.
template <typename H>
double integrate_half(H h, bool increasing, double shift, double& err_sum)
{
    constexpr double levels[] = {-36.0, -3.0, 0.0, 2.0, 4.0};
    constexpr double u_lo = 1e-300;
    constexpr double u_hi = 0.5 * pi;
    constexpr int iters = 48;

    double cuts[7];
    int n = 0;
    cuts[n++] = 0.0;
    for (double level : levels) {
        const double target = shift + level;
        double a = u_lo;
        double b = u_hi;
        const double ha = h(a);
        const double hb = h(b);
        if (!((ha - target) * (hb - target) < 0.0))
            continue;
        for (int it = 0; it < iters; ++it) {
            const double m = 0.5 * (a + b);
            if (!(m > a && m < b))
                break;
            ((h(m) < target) == increasing ? a : b) = m;
        }
        cuts[n++] = 0.5 * (a + b);
    }
    cuts[n++] = u_hi;
    std::sort(cuts, cuts + n);

    auto integrand = [&](double u) {
        const double x = h(u) - shift;
        return x > 36.0 ? 0.0 : std::exp(-std::exp(x));
    };
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0;
    for (int c = 0; c + 1 < n; ++c) {
        const double a = cuts[c];
        const double b = cuts[c + 1];
        if (!(b > a))
            continue;
        const double x_mid = h(0.5 * (a + b)) - shift;
        if (x_mid < -36.0) {
            total += b - a;
        } else if (x_mid > 4.0) {
            continue;
        } else {
            // h varies like log u near the singular end, so wide panels are
            // split geometrically. Each piece is mapped onto [0, 1]: boost's
            // Kronrod error test stalls on very narrow raw intervals.
            const int pieces = a > 0.0 ? std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(8.0)))) : 1;
            const double ratio = std::pow(b / a, 1.0 / pieces);
            double lo = a;
            for (int p = 0; p < pieces; ++p) {
                const double hi = p + 1 == pieces ? b : lo * ratio;
                const double w = hi - lo;
                // Relative tolerance loosened on narrow pieces, whose absolute
                // share is small and whose integrand is only accurate to
                // ~1e-9 once 1/delta amplifies rounding in h.
                const double tol = std::clamp(1e-11 / w, 1e-10, 1e-4);
                double err = 0.0;
                total += w * gk::integrate([&](double y) { return integrand(lo + w * y); }, 0.0, 1.0, 12, tol, &err);
                err_sum += w * err;
                lo = hi;
            }
        }
    }
    return total;
}

} // namespace detail

/// Pr(Z <= t) for Z ~ S(alpha, beta = 1, cos(pi alpha / 2)):
///
///   F(t) = (1/pi) int_0^pi exp(-g(theta) / t^(alpha/delta)) d theta.
///
/// The integrand exp(-e^x), x = log g - (alpha/delta) log t, falls from 1
/// to 0 as x crosses 0. Crossings of the levels x = -36, -3, 0, 2, 4 are
/// located by bisection and used as panel boundaries. Below x = -36 the
/// integrand is 1 to double precision; above x = 4 it is below 2e-24 and is
/// dropped. Remaining panels go to adaptive Gauss-Kronrod. The half
/// (pi/2, pi) is integrated in s = pi - theta.
inline double stable_cdf(double t, double delta)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw domain_error("stable_cdf needs a positive finite t");
    validate_gap(delta);
    const double alpha = 1.0 - delta;
    const double shift = (alpha / delta) * std::log(t);

    double err = 0.0;
    const double lower = detail::integrate_half([&](double u) { return detail::log_g_lower(u, delta); },
                                                true, shift, err);
    const double upper = detail::integrate_half([&](double u) { return detail::log_g_upper(u, delta); },
                                                false, shift, err);
    const double total = lower + upper;
    if (!(err <= 1e-9) || !std::isfinite(total))
        throw numeric_error("stable_cdf quadrature did not converge (error estimate " + detail::fmt(err) + ")");
    return std::clamp(total / detail::pi, 0.0, 1.0);
}

/// Bracket of the right tail bound,
///   B(t) = delta + delta/log(1+eps) + delta/(t delta log delta + log(1+eps)),
/// with t = 1 for the plain bound.
inline double right_tail_bracket(double epsilon, double delta, double t = 1.0)
{
    detail::validate_epsilon(epsilon);
    validate_gap(delta);
    const double l1e = std::log1p(epsilon);
    const double den = t * delta * std::log(delta) + l1e;
    if (!(den > 0.0))
        throw infeasible_error("right tail bound needs t*delta*log(delta) + log(1+eps) > 0; got " +
                               detail::fmt(den) + " at eps=" + detail::fmt(epsilon) +
                               ", gap=" + detail::fmt(delta));
    return delta + delta / l1e + delta / den;
}

/// Pr(F_hat >= (1+eps) F) <= exp(k log(B/2)). The value may exceed 1 where
/// the asymptotic bracket is large; it is still a (trivial) bound there.
inline double right_tail_bound(const BoundQuery& q)
{
    const double b = right_tail_bracket(q.epsilon, q.delta);
    return std::exp(static_cast<double>(q.k) * std::log(0.5 * b));
}

/// Right tail bound built with an extra trapezoid node at theta_t. The
/// Delta log Delta term is scaled by t, which loosens its grip as t -> 0,
/// but for t too close to 0 the neglected delta^t terms stop being small;
/// no cutoff is imposed here.
inline double right_tail_bound_refined(const BoundQuery& q, double t)
{
    if (!(t > 0.0 && t < 1.0))
        throw domain_error("refinement node t must lie in (0, 1)");
    const double b = right_tail_bracket(q.epsilon, q.delta, t);
    return std::exp(static_cast<double>(q.k) * std::log(0.5 * b));
}

/// Pr(F_hat <= (1-eps) F) <= k exp(-delta alpha^(1/delta-1) / (1-eps)^(1/delta)).
inline LeftTailBound left_tail_bound(const BoundQuery& q)
{
    if (!(q.epsilon > 0.0 && q.epsilon < 1.0))
        throw domain_error("left tail bound needs 0 < eps < 1");
    validate_gap(q.delta);
    const double d = q.delta;
    const double log_e = std::log(d) + (1.0 / d - 1.0) * std::log1p(-d) - std::log1p(-q.epsilon) / d;
    const double e = std::exp(log_e);
    if (e > 700.0)
        return {0.0, log_e, true};
    return {static_cast<double>(q.k) * std::exp(-e), log_e, false};
}

namespace detail {

// Denominator of the planner; NaN-free, returns -inf when the inner bracket
// denominator is not positive.
inline double planner_denominator(double epsilon, double delta)
{
    const double l1e = std::log1p(epsilon);
    const double inner = delta * std::log(delta) + l1e;
    if (!(inner > 0.0))
        return -std::numeric_limits<double>::infinity();
    const double bracket = 0.5 + 0.5 / l1e + 0.5 / inner;
    return -std::log(delta) - std::log(bracket);
}

} // namespace detail

/// Largest gap for which the planner is feasible at this epsilon (the
/// feasible set is (0, gap*]); 0 when no gap in (1e-300, 0.5) works.
inline double max_feasible_gap(double epsilon)
{
    detail::validate_epsilon(epsilon);
    auto ok = [&](double log_d) { return detail::planner_denominator(epsilon, std::exp(log_d)) > 0.0; };
    double lo = std::log(1e-300);
    double hi = std::log(std::nextafter(0.5, 0.0));
    if (ok(hi))
        return std::exp(hi);
    if (!ok(lo))
        return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return std::exp(lo);
}

/// Minimum sample count k with right tail bound <= fail_prob:
///
///   k >= log(1/fail) / ( log(1/delta) - log( 1/2 + 1/(2 log(1+eps))
///                                           + 1/(2 delta log delta + 2 log(1+eps)) ) ).
inline SamplePlan sample_size(const BoundQuery& q)
{
    detail::validate_epsilon(q.epsilon);
    validate_gap(q.delta);
    if (!(q.fail_prob > 0.0 && q.fail_prob <= 1.0))
        throw domain_error("failure probability must lie in (0, 1]");
    const double den = detail::planner_denominator(q.epsilon, q.delta);
    if (!(den > 0.0)) {
        const double gap_max = max_feasible_gap(q.epsilon);
        throw infeasible_error("planner denominator is not positive at eps=" + detail::fmt(q.epsilon) +
                               ", gap=" + detail::fmt(q.delta) + "; the gap must be at most " +
                               detail::fmt(gap_max) + " for this eps");
    }
    const double k = q.fail_prob == 1.0 ? 0.0 : -std::log(q.fail_prob) / den;
    return {k, static_cast<std::uint64_t>(std::ceil(k))};
}

namespace detail {

inline void validate_theta_query(const ThetaQuery& q)
{
    if (!(q.gamma >= 0.0) || !std::isfinite(q.gamma))
        throw domain_error("gamma must be a finite non-negative number");
    validate_epsilon(q.epsilon);
    validate_gap(q.delta);
}

} // namespace detail

/// Small-delta expansion
///
///   theta_gamma ~ pi - pi delta / (delta + c + delta log(1/c + 1)),
///   c = gamma delta log delta + log(1+eps).
inline double theta_gamma_asymptotic(const ThetaQuery& q)
{
    detail::validate_theta_query(q);
    const double d = q.delta;
    const double c = q.gamma * d * std::log(d) + std::log1p(q.epsilon);
    if (!(c > 0.0))
        throw infeasible_error("theta_gamma expansion needs gamma*delta*log(delta) + log(1+eps) > 0");
    const double den = d + c + d * std::log(1.0 / c + 1.0);
    return detail::pi - detail::pi * d / den;
}

/// Root of log g(theta) = log(1+eps)/delta + gamma log delta by bisection.
/// g spans hundreds of orders of magnitude, so no derivative is used; the
/// bracket is narrowed until adjacent doubles.
inline double theta_gamma_numeric(const ThetaQuery& q)
{
    detail::validate_theta_query(q);
    const double target = std::log1p(q.epsilon) / q.delta + q.gamma * std::log(q.delta);
    const double lo = detail::theta_lo;
    const double hi = detail::theta_hi;
    if (log_g(lo, q.delta) > target)
        throw no_root_error("delta^gamma (1+eps)^(1/delta) is below the infimum of g");
    if (log_g(hi, q.delta) < target)
        throw no_root_error("target level of g is not reached before pi");
    const auto b = detail::bisect_log_g(target, q.delta, lo, hi, 2000);
    return 0.5 * (b.lo + b.hi);
}

} // namespace ccsketch
