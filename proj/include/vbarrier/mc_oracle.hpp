#pragma once

#include <cstdint>

#include "vbarrier/model.hpp"
#include "vbarrier/pricer.hpp"

// Monte Carlo estimators used as independent checks of the closed forms.

namespace vbarrier {

enum class Monitoring { bridge_corrected, discrete };

struct MCConfig {
    std::int64_t n_paths = 1'000'000;
    int n_steps = 512;  // per unit of time; the grid has ceil(T * n_steps) steps
    std::uint64_t seed = 20240601;
    Monitoring monitoring = Monitoring::bridge_corrected;
    // Random draws aggregated into each simulated step. Running with
    // (n_steps, draws_per_step = 2) consumes exactly the numbers of
    // (2 n_steps, 1), which couples the two discretisations path by path.
    int draws_per_step = 1;
    // 0 selects std::thread::hardware_concurrency().
    int threads = 0;

    void validate() const;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    int n_steps = 0;  // steps actually simulated
    std::uint64_t seed = 0;
};

// E[exp(-int_0^tau r dt)] with exact OU transitions and trapezoidal
// accumulation of the integral.
MCEstimate bond_mc(double r0, double tau, const VasicekParams& p, const MCConfig& cfg);

// Simulates the log forward x = ln(S / P) under the tau-forward measure:
// dx = -sigma_hat^2 / 2 dt + sigma_hat dW, with exact Gaussian steps.
MCEstimate price_barrier_mc(const MarketState& state, const OptionSpec& spec,
                            const VasicekParams& p, const MCConfig& cfg);

// Joint simulation of (ln S, r) under the risk-neutral measure with
// correlated drivers, pathwise discounting, and the barrier monitored on
// ln(S_t / P(r_t, t; tau)).
MCEstimate price_barrier_mc_two_factor(const MarketState& state, const OptionSpec& spec,
                                       const VasicekParams& p, const MCConfig& cfg);

// Probability that a Brownian bridge with variance v between a and b
// touches the level `barrier` (both end points below it).
double bridge_crossing_probability(double a, double b, double v, double barrier);

// Probability that a Brownian bridge with variance v between a and b leaves
// the corridor (lower, upper); image series truncated at |k| <= 10.
double bridge_exit_probability(double a, double b, double v, double lower, double upper);

}  // namespace vbarrier
