#include "vbarrier/constant_rate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vbarrier {

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// E[(F_T - K)^+ 1{F_T < H}] for a driftless lognormal F_T, no barrier.
double capped_call(double forward, double strike, double level, double total_variance) {
    const double sd = std::sqrt(total_variance);
    const double d2_level = (std::log(forward / level) - 0.5 * total_variance) / sd;
    return black_call(forward, strike, total_variance) - black_call(forward, level, total_variance) -
           (level - strike) * norm_cdf(d2_level);
}

}  // namespace

double black_call(double forward, double strike, double total_variance) {
    if (total_variance <= 0.0) return std::max(forward - strike, 0.0);
    const double sd = std::sqrt(total_variance);
    const double d1 = (std::log(forward / strike) + 0.5 * total_variance) / sd;
    return forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd);
}

double up_and_out_call_forward(double forward, double strike, double barrier,
                               double total_variance, double discount) {
    if (forward >= barrier || strike >= barrier) return 0.0;
    if (total_variance <= 0.0) return discount * std::max(forward - strike, 0.0);
    // Reflection principle for a martingale: V(F) = u(F) - (F / H) u(H^2 / F).
    const double mirrored = barrier * barrier / forward;
    return discount * (capped_call(forward, strike, barrier, total_variance) -
                       forward / barrier * capped_call(mirrored, strike, barrier, total_variance));
}

}  // namespace vbarrier
