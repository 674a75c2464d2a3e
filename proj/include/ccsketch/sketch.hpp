#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "stable_sampler.hpp"

namespace ccsketch {

/// One turnstile arrival: A[index] += increment.
struct StreamUpdate {
    std::uint64_t index;
    double increment;
};

struct MomentEstimate {
    double value;
    double alpha;
    std::uint32_t k_used;
};

/// Compressed Counting sketch: x = A R for a k-column maximally skewed
/// stable projection R, plus an exact running sum F1.
///
/// Single writer. Shard a stream across sketches sharing one config and
/// merge() the results to ingest concurrently.
class CCSketch {
public:
    explicit CCSketch(const SketchConfig& config)
        : config_(config), params_((config.validate(), config.delta)), x_(config.k, 0.0)
    {
    }

    /// Rebuilds a sketch from persisted state.
    CCSketch(const SketchConfig& config, double f1, std::vector<double> x)
        : CCSketch(config)
    {
        if (x.size() != config.k)
            throw dimension_error("accumulator count " + std::to_string(x.size()) +
                                  " does not match k = " + std::to_string(config.k));
        x_ = std::move(x);
        f1_ = f1;
    }

    const SketchConfig& config() const { return config_; }
    std::span<const double> x() const { return x_; }
    double f1() const { return f1_; }

    void update(const StreamUpdate& u)
    {
        if (!config_.unbounded() && u.index >= config_.domain_size)
            throw index_error("stream index " + std::to_string(u.index) + " outside domain of size " +
                              std::to_string(config_.domain_size));
        for (std::uint32_t j = 0; j < config_.k; ++j)
            x_[j] += u.increment * weight(u.index, j);
        f1_ += u.increment;
    }

    void update(std::uint64_t index, double increment) { update(StreamUpdate{index, increment}); }

    CCSketch& merge(const CCSketch& other)
    {
        if (!(config_ == other.config_))
            throw incompatible_sketch_error("cannot merge sketches with different configurations");
        for (std::uint32_t j = 0; j < config_.k; ++j)
            x_[j] += other.x_[j];
        f1_ += other.f1_;
        return *this;
    }

    /// Sample-minimum estimate (min_j x_j)^alpha of F_(alpha).
    MomentEstimate estimate_moment() const
    {
        const double lo = *std::min_element(x_.begin(), x_.end());
        if (!(lo > 0.0))
            throw non_positive_minimum_error(
                "minimum projected accumulator is " + std::to_string(lo) +
                " (empty stream, non-strict-turnstile input, or cancellation)");
        const double alpha = config_.alpha();
        return {std::exp(alpha * std::log(lo)), alpha, config_.k};
    }

    double weight(std::uint64_t i, std::uint32_t j) const
    {
        return skewed_stable(params_, derive_pair(config_.seed, i, j));
    }

private:
    SketchConfig config_;
    StableParams params_;
    std::vector<double> x_;
    double f1_ = 0.0;
};

inline CCSketch new_sketch(const SketchConfig& config) { return CCSketch(config); }

inline CCSketch merge(const CCSketch& a, const CCSketch& b)
{
    CCSketch out = a;
    out.merge(b);
    return out;
}

inline MomentEstimate estimate_moment(const CCSketch& sketch) { return sketch.estimate_moment(); }

/// Direct x = A R over a materialized vector; the oracle path for update().
inline CCSketch dense_project(std::span<const double> vector, const SketchConfig& config)
{
    if (config.unbounded() || vector.size() != config.domain_size)
        throw dimension_error("dense vector length " + std::to_string(vector.size()) +
                              " does not match domain size " + std::to_string(config.domain_size));
    CCSketch base(config);
    std::vector<double> x(config.k, 0.0);
    double f1 = 0.0;
    for (std::size_t i = 0; i < vector.size(); ++i) {
        if (vector[i] == 0.0)
            continue;
        for (std::uint32_t j = 0; j < config.k; ++j)
            x[j] += vector[i] * base.weight(i, j);
        f1 += vector[i];
    }
    return CCSketch(config, f1, std::move(x));
}

/// F_(alpha) = sum_i A[i]^alpha, with 0^alpha = 0.
inline double exact_moment(std::span<const double> vector, double alpha)
{
    double sum = 0.0;
    bool any_positive = false;
    for (double a : vector) {
        if (a < 0.0)
            throw domain_error("exact_moment requires non-negative entries");
        if (a > 0.0) {
            any_positive = true;
            sum += std::pow(a, alpha);
        }
    }
    if (!any_positive)
        throw degenerate_input_error("exact_moment of an all-zero vector");
    return sum;
}

} // namespace ccsketch
