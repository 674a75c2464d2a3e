#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace ccsketch {

// The gap is 1 - alpha. Everything downstream needs 0 < gap < 0.5.
inline void validate_gap(double delta)
{
    if (!(delta > 0.0 && delta < 0.5))
        throw config_error("gap must lie in (0, 0.5), got " + std::to_string(delta));
}

// Fully determines the projection matrix R: two sketches built from equal
// configs see identical weights and can be merged.
struct SketchConfig {
    double delta = 1e-4;
    std::uint32_t k = 1;
    std::uint64_t seed = 0;
    // 0 means unbounded: indices are not validated (hashed key spaces).
    std::uint64_t domain_size = 0;

    double alpha() const { return 1.0 - delta; }
    bool unbounded() const { return domain_size == 0; }

    void validate() const
    {
        if (k == 0)
            throw config_error("sample count k must be at least 1");
        validate_gap(delta);
    }

    friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

} // namespace ccsketch
