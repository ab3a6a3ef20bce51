#pragma once

#include <cmath>

namespace gossipdet {

/// Rounding used for schedule-derived step counts: half away from zero.
inline long round_half_away(double x) {
    return static_cast<long>(x < 0.0 ? std::ceil(x - 0.5) : std::floor(x + 0.5));
}

/// One compensated (Kahan) accumulation step.
inline void kahan_add(double& sum, double& compensation, double value) {
    const double y = value - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
}

}  // namespace gossipdet
