#pragma once

// Monte Carlo harness for the right tail of the sample-minimum estimator and
// for the sampler's law against the quadrature CDF.
//
// Trial tau draws its k variates as entries (tau, j) of the projection
// matrix keyed by base_seed, so a trial is a pure function of
// (base_seed, tau). Trials are split across threads in contiguous blocks and
// only integer histograms are combined, which keeps every result independent
// of the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bounds.hpp"
#include "errors.hpp"
#include "hash.hpp"
#include "sketch.hpp"
#include "stable_sampler.hpp"

namespace ccsketch {

struct SimulationSpec {
    double delta;
    std::uint32_t k;
    std::vector<double> epsilon_grid;
    std::uint64_t trials;
    std::uint64_t base_seed;

    void validate() const
    {
        validate_gap(delta);
        if (k == 0)
            throw config_error("simulation needs k >= 1");
        if (trials == 0)
            throw config_error("simulation needs at least one trial");
        if (epsilon_grid.empty())
            throw config_error("epsilon grid is empty");
        for (std::size_t g = 0; g < epsilon_grid.size(); ++g) {
            if (!(epsilon_grid[g] > 0.0) || !std::isfinite(epsilon_grid[g]))
                throw config_error("epsilon grid entries must be positive");
            if (g > 0 && !(epsilon_grid[g] > epsilon_grid[g - 1]))
                throw config_error("epsilon grid must be strictly ascending");
        }
    }
};

struct TailRow {
    double epsilon;
    std::uint64_t hits;
    double empirical_prob;
    // min(1, right_tail_bound); exactly 1 where the asymptotic bound is
    // infeasible (bound_feasible == false).
    double bound;
    bool bound_feasible;
    std::uint64_t trials;
};

struct TailCurve {
    double delta;
    std::uint32_t k;
    std::vector<TailRow> rows;
};

/// `n` points log-spaced over [lo, hi], both ends included.
inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0 && hi > lo) || n < 2)
        throw config_error("log-spaced grid needs 0 < lo < hi and n >= 2");
    std::vector<double> grid(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t g = 0; g < n; ++g)
        grid[g] = std::pow(10.0, a + (b - a) * static_cast<double>(g) / static_cast<double>(n - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

inline std::vector<double> default_epsilon_grid() { return log_spaced_grid(1e-4, 1e-1, 30); }

inline unsigned default_threads()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

namespace detail {

// Runs body(begin, end, slot) over `count` items in `threads` contiguous blocks.
template <typename Body>
void parallel_blocks(std::uint64_t count, unsigned threads, Body&& body)
{
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2 * static_cast<std::uint64_t>(threads)) {
        body(std::uint64_t{0}, count, 0u);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (count + threads - 1) / threads;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned s = 0; s < threads; ++s) {
        const std::uint64_t begin = std::min(count, s * chunk);
        const std::uint64_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end, s] {
            try {
                body(begin, end, s);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

inline TailCurve finish_curve(const SimulationSpec& spec, const std::vector<std::uint64_t>& hist)
{
    // hist[c] = trials whose log ratio passes exactly the first c thresholds.
    TailCurve curve{spec.delta, spec.k, {}};
    const std::size_t n = spec.epsilon_grid.size();
    std::uint64_t above = 0;
    std::vector<std::uint64_t> hits(n);
    for (std::size_t g = n; g-- > 0;) {
        above += hist[g + 1];
        hits[g] = above;
    }
    for (std::size_t g = 0; g < n; ++g) {
        const double eps = spec.epsilon_grid[g];
        TailRow row{eps, hits[g], static_cast<double>(hits[g]) / static_cast<double>(spec.trials),
                    1.0, false, spec.trials};
        try {
            row.bound = std::min(1.0, right_tail_bound({eps, 0.5, spec.delta, spec.k}));
            row.bound_feasible = true;
        } catch (const infeasible_error&) {
        }
        curve.rows.push_back(row);
    }
    return curve;
}

} // namespace detail

/// Empirical Pr(F_hat / F >= 1 + eps) for a standardized stream (F = 1), so
/// F_hat / F = (min_j x_j)^alpha with x_j i.i.d. stable. Each row is paired
/// with the right tail bound at the same (eps, delta, k).
inline TailCurve simulate_right_tail(const SimulationSpec& spec, unsigned threads = 1)
{
    spec.validate();
    const StableParams params(spec.delta);
    std::vector<double> thresholds(spec.epsilon_grid.size());
    std::transform(spec.epsilon_grid.begin(), spec.epsilon_grid.end(), thresholds.begin(),
                   [](double e) { return std::log1p(e); });

    const std::size_t bins = thresholds.size() + 1;
    threads = std::max(1u, threads);
    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(bins, 0));
    detail::parallel_blocks(spec.trials, threads, [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
        auto& hist = partial[slot];
        for (std::uint64_t tau = begin; tau < end; ++tau) {
            double lo = log_skewed_stable(params, derive_pair(spec.base_seed, tau, 0));
            for (std::uint32_t j = 1; j < spec.k; ++j)
                lo = std::min(lo, log_skewed_stable(params, derive_pair(spec.base_seed, tau, j)));
            const double log_ratio = params.alpha * lo;
            const auto passed = std::upper_bound(thresholds.begin(), thresholds.end(), log_ratio) -
                                thresholds.begin();
            ++hist[static_cast<std::size_t>(passed)];
        }
    });
    std::vector<std::uint64_t> hist(bins, 0);
    for (const auto& p : partial)
        for (std::size_t b = 0; b < bins; ++b)
            hist[b] += p[b];
    return detail::finish_curve(spec, hist);
}

/// End-to-end variant: every trial builds a sketch of `vector` with a fresh
/// seed derived from (base_seed, tau) and compares the sample-minimum
/// estimate against the exact moment. Much slower; used to cross-check the
/// standardized simulation.
inline TailCurve simulate_right_tail_projected(const SimulationSpec& spec, std::span<const double> vector,
                                               unsigned threads = 1)
{
    spec.validate();
    const double alpha = 1.0 - spec.delta;
    const double exact = exact_moment(vector, alpha);
    const std::size_t bins = spec.epsilon_grid.size() + 1;
    threads = std::max(1u, threads);
    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(bins, 0));
    detail::parallel_blocks(spec.trials, threads, [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
        for (std::uint64_t tau = begin; tau < end; ++tau) {
            SketchConfig config{spec.delta, spec.k, counter_hash(spec.base_seed, tau, 0, 2), vector.size()};
            const double ratio = dense_project(vector, config).estimate_moment().value / exact;
            std::size_t passed = 0;
            while (passed < spec.epsilon_grid.size() && ratio >= 1.0 + spec.epsilon_grid[passed])
                ++passed;
            ++partial[slot][passed];
        }
    });
    std::vector<std::uint64_t> hist(bins, 0);
    for (const auto& p : partial)
        for (std::size_t b = 0; b < bins; ++b)
            hist[b] += p[b];
    return detail::finish_curve(spec, hist);
}

/// Kolmogorov-Smirnov distance between n sampler draws (entries (i, 0) under
/// `seed`) and stable_cdf.
inline double empirical_cdf_check(double delta, std::uint64_t n, std::uint64_t seed, unsigned threads = 1)
{
    if (n < 1000)
        throw config_error("empirical_cdf_check needs at least 1000 draws");
    const StableParams params(delta);
    std::vector<double> draws(n);
    for (std::uint64_t i = 0; i < n; ++i)
        draws[i] = skewed_stable(params, derive_pair(seed, i, 0));
    std::sort(draws.begin(), draws.end());

    threads = std::max(1u, threads);
    std::vector<double> worst(threads, 0.0);
    const double nn = static_cast<double>(n);
    detail::parallel_blocks(n, threads, [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
        double d = 0.0;
        for (std::uint64_t i = begin; i < end; ++i) {
            const double f = stable_cdf(draws[i], delta);
            d = std::max({d, static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn});
        }
        worst[slot] = d;
    });
    return *std::max_element(worst.begin(), worst.end());
}

/// The four reference right-tail panels: gap 1e-4 with
/// k = 1, 2, 3 and gap 1e-6 with k = 1. All panels share base_seed, so the
/// k = 3 draws extend the k = 1 draws trial by trial.
inline std::vector<SimulationSpec> figure1_default_specs(std::uint64_t base_seed = 1,
                                                         std::uint64_t trials = 1'000'000,
                                                         std::uint64_t trials_small_gap = 10'000'000)
{
    const auto grid = default_epsilon_grid();
    return {
        {1e-4, 1, grid, trials, base_seed},
        {1e-4, 2, grid, trials, base_seed},
        {1e-4, 3, grid, trials, base_seed},
        {1e-6, 1, grid, trials_small_gap, base_seed},
    };
}

inline std::vector<TailCurve> figure1_dataset(const std::vector<SimulationSpec>& specs, unsigned threads = 1)
{
    std::vector<TailCurve> out;
    out.reserve(specs.size());
    for (const auto& spec : specs)
        out.push_back(simulate_right_tail(spec, threads));
    return out;
}

// CSV emission. The first line names the schema and its version; zero-count
// cells are written as "<1/trials" since the event was never observed.

inline constexpr const char* tail_curve_schema = "# ccsketch tail_curve v1";
inline constexpr const char* figure1_schema = "# ccsketch figure1 v1";

namespace detail {

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string empirical_cell(const TailRow& row)
{
    if (row.hits == 0)
        return "<" + num(1.0 / static_cast<double>(row.trials));
    return num(row.empirical_prob);
}

inline void write_row(std::ostream& out, const TailRow& row)
{
    out << num(row.epsilon) << ',' << empirical_cell(row) << ',' << num(row.bound) << ',' << row.trials << '\n';
}

} // namespace detail

inline void write_tail_csv(std::ostream& out, const TailCurve& curve)
{
    out << tail_curve_schema << '\n' << "epsilon,empirical_prob,bound,trials\n";
    for (const auto& row : curve.rows)
        detail::write_row(out, row);
}

inline void write_figure1_csv(std::ostream& out, std::span<const TailCurve> curves)
{
    out << figure1_schema << '\n' << "delta,k,epsilon,empirical_prob,bound,trials\n";
    for (const auto& curve : curves)
        for (const auto& row : curve.rows) {
            out << detail::num(curve.delta) << ',' << curve.k << ',';
            detail::write_row(out, row);
        }
}

} // namespace ccsketch
