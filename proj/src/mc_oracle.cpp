#include "vbarrier/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "vbarrier/philox.hpp"
#include "vbarrier/quadrature.hpp"

namespace vbarrier {

namespace {

constexpr std::int64_t kBlockPaths = 4096;
// Crossing probabilities below exp(-kNegligibleExponent) are not drawn.
constexpr double kNegligibleExponent = 40.0;
constexpr int kImageTerms = 10;

struct BlockSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

// Runs `path_value(path_index)` for every path. Paths are grouped in
// fixed-size blocks, each block is reduced pairwise, and block results are
// reduced pairwise in block order, so the answer does not depend on the
// thread count.
template <class PathFn>
std::pair<double, double> run_paths(const MCConfig& cfg, const PathFn& path_value) {
    const std::int64_t n = cfg.n_paths;
    const std::int64_t n_blocks = (n + kBlockPaths - 1) / kBlockPaths;
    std::vector<BlockSums> blocks(static_cast<std::size_t>(n_blocks));

    auto run_block = [&](std::int64_t b) {
        const std::int64_t first = b * kBlockPaths;
        const std::int64_t last = std::min(n, first + kBlockPaths);
        std::vector<double> values;
        std::vector<double> squares;
        values.reserve(static_cast<std::size_t>(last - first));
        squares.reserve(static_cast<std::size_t>(last - first));
        for (std::int64_t i = first; i < last; ++i) {
            const double v = path_value(static_cast<std::uint64_t>(i));
            values.push_back(v);
            squares.push_back(v * v);
        }
        blocks[static_cast<std::size_t>(b)] = BlockSums{pairwise_sum(values), pairwise_sum(squares)};
    };

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::min<std::int64_t>(threads, n_blocks));
    if (threads <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::int64_t b = t; b < n_blocks; b += threads) run_block(b);
            });
        }
    }

    std::vector<double> sums;
    std::vector<double> sums_sq;
    for (const BlockSums& b : blocks) {
        sums.push_back(b.sum);
        sums_sq.push_back(b.sum_sq);
    }
    const double nd = static_cast<double>(n);
    const double mean = pairwise_sum(sums) / nd;
    const double second = pairwise_sum(sums_sq) / nd;
    const double variance = n > 1 ? std::max(0.0, second - mean * mean) * nd / (nd - 1.0) : 0.0;
    return {mean, std::sqrt(variance / nd)};
}

// Uniform grid from t0 to tau, `steps` coarse steps each split into
// `draws` fine steps.
struct TimeGrid {
    int steps = 0;
    int draws = 1;
    std::vector<double> coarse;  // steps + 1 points
    std::vector<double> fine;    // steps * draws + 1 points
};

TimeGrid make_grid(double t0, double tau, const MCConfig& cfg) {
    const double horizon = tau - t0;
    const double raw = horizon * cfg.n_steps;
    TimeGrid g;
    g.steps = std::max(1, static_cast<int>(std::ceil(raw * (1.0 - 1e-12))));
    g.draws = cfg.draws_per_step;
    const int fine_steps = g.steps * g.draws;
    g.fine.resize(static_cast<std::size_t>(fine_steps) + 1);
    for (int k = 0; k <= fine_steps; ++k) {
        g.fine[static_cast<std::size_t>(k)] =
            k == fine_steps ? tau : t0 + horizon * static_cast<double>(k) / fine_steps;
    }
    g.coarse.resize(static_cast<std::size_t>(g.steps) + 1);
    for (int j = 0; j <= g.steps; ++j) {
        g.coarse[static_cast<std::size_t>(j)] = g.fine[static_cast<std::size_t>(j) * g.draws];
    }
    return g;
}

// Exact OU step: r' = theta + (r - theta) decay + scale Z.
struct OuStep {
    double decay = 1.0;
    double scale = 0.0;
};

OuStep ou_step(double h, const VasicekParams& p) {
    // Var = sigma2^2 (1 - exp(-2 a h)) / (2 a); b_factor handles a -> 0.
    return OuStep{std::exp(-p.a * h), p.sigma2 * std::sqrt(b_factor(0.0, h, 2.0 * p.a))};
}

// Knock-out test for one monitored step of the log forward.
class Monitor {
public:
    Monitor(const OptionSpec& spec, Monitoring mode)
        : double_(spec.kind == BarrierKind::double_knock_out),
          bridge_(mode == Monitoring::bridge_corrected),
          lower_(spec.lower_barrier),
          upper_(spec.upper_barrier) {}

    bool outside(double x) const {
        return x >= upper_ || (double_ && x <= lower_);
    }

    // True if the step from `from` to `to` with variance v knocks out.
    bool knocked(double from, double to, double v, const PathRandom& rng,
                 std::uint32_t uniform_index) const {
        if (outside(to)) return true;
        if (!bridge_) return false;
        const double up = 2.0 * (upper_ - from) * (upper_ - to) / v;
        if (!double_) {
            if (up >= kNegligibleExponent) return false;
            return rng.uniform(uniform_index) < std::exp(-up);
        }
        const double down = 2.0 * (from - lower_) * (to - lower_) / v;
        if (std::min(up, down) >= kNegligibleExponent) return false;
        return rng.uniform(uniform_index) < bridge_exit_probability(from, to, v, lower_, upper_);
    }

private:
    bool double_;
    bool bridge_;
    double lower_;
    double upper_;
};

MCEstimate make_estimate(double mean, double se, double scale, const MCConfig& cfg, int steps) {
    return MCEstimate{scale * mean, scale * se, cfg.n_paths, steps, cfg.seed};
}

bool inside_at_inception(double x, const OptionSpec& spec) {
    if (x >= spec.upper_barrier) return false;
    return spec.kind != BarrierKind::double_knock_out || x > spec.lower_barrier;
}

}  // namespace

void MCConfig::validate() const {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (draws_per_step < 1) throw std::invalid_argument("draws_per_step must be >= 1");
}

double bridge_crossing_probability(double a, double b, double v, double barrier) {
    if (a >= barrier || b >= barrier) return 1.0;
    if (!(v > 0.0)) return 0.0;
    return std::exp(-2.0 * (barrier - a) * (barrier - b) / v);
}

double bridge_exit_probability(double a, double b, double v, double lower, double upper) {
    if (a <= lower || a >= upper || b <= lower || b >= upper) return 1.0;
    if (!(v > 0.0)) return 0.0;
    const double w = upper - lower;
    // Killed-bridge density over free density, by images at L + k w.
    double exit = 0.0;
    for (int k = -kImageTerms; k <= kImageTerms; ++k) {
        const double c = lower + k * w;
        exit += std::exp(-2.0 * (c - a) * (c - b) / v);
        if (k != 0) exit -= std::exp(-2.0 * k * w * (k * w + b - a) / v);
    }
    return std::clamp(exit, 0.0, 1.0);
}

MCEstimate bond_mc(double r0, double tau, const VasicekParams& p, const MCConfig& cfg) {
    cfg.validate();
    p.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("bond_mc: maturity must be positive");
    const TimeGrid grid = make_grid(0.0, tau, cfg);
    const double h_fine = tau / (grid.steps * grid.draws);
    const double h = tau / grid.steps;
    const OuStep step = ou_step(h_fine, p);

    const auto path = [&](std::uint64_t i) {
        PathRandom rng(cfg.seed, i);
        double r = r0;
        double integral = 0.0;
        for (int j = 0; j < grid.steps; ++j) {
            const double r_start = r;
            for (int k = 0; k < grid.draws; ++k) {
                r = p.theta + (r - p.theta) * step.decay + step.scale * rng.normal();
            }
            integral += 0.5 * (r_start + r) * h;
        }
        return std::exp(-integral);
    };
    const auto [mean, se] = run_paths(cfg, path);
    return make_estimate(mean, se, 1.0, cfg, grid.steps);
}

MCEstimate price_barrier_mc(const MarketState& state, const OptionSpec& spec,
                            const VasicekParams& p, const MCConfig& cfg) {
    cfg.validate();
    spec.validate();
    p.validate();
    const double x0 = log_forward(state, spec, p);
    if (!inside_at_inception(x0, spec)) return MCEstimate{0.0, 0.0, cfg.n_paths, 0, cfg.seed};

    const TimeGrid grid = make_grid(state.time, spec.maturity, cfg);
    std::vector<double> fine_sd(grid.fine.size() - 1);
    for (std::size_t k = 0; k < fine_sd.size(); ++k) {
        fine_sd[k] = std::sqrt(integrated_variance(grid.fine[k], grid.fine[k + 1], spec.maturity, p));
    }
    std::vector<double> step_var(static_cast<std::size_t>(grid.steps));
    for (int j = 0; j < grid.steps; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        step_var[jj] = integrated_variance(grid.coarse[jj], grid.coarse[jj + 1], spec.maturity, p);
    }

    const Monitor monitor(spec, cfg.monitoring);
    const double strike = spec.strike;
    const auto path = [&](std::uint64_t i) {
        PathRandom rng(cfg.seed, i);
        double x = x0;
        for (int j = 0; j < grid.steps; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            double shock = 0.0;
            for (int k = 0; k < grid.draws; ++k) {
                shock += fine_sd[jj * grid.draws + k] * rng.normal();
            }
            const double next = x - 0.5 * step_var[jj] + shock;
            if (monitor.knocked(x, next, step_var[jj], rng, static_cast<std::uint32_t>(j * grid.draws))) {
                return 0.0;
            }
            x = next;
        }
        return std::max(std::exp(x) - strike, 0.0);
    };
    const auto [mean, se] = run_paths(cfg, path);
    const double discount = bond_price(state.rate, state.time, spec.maturity, p);
    return make_estimate(mean, se, discount, cfg, grid.steps);
}

MCEstimate price_barrier_mc_two_factor(const MarketState& state, const OptionSpec& spec,
                                       const VasicekParams& p, const MCConfig& cfg) {
    cfg.validate();
    spec.validate();
    p.validate();
    const double x0 = log_forward(state, spec, p);
    if (!inside_at_inception(x0, spec)) return MCEstimate{0.0, 0.0, cfg.n_paths, 0, cfg.seed};

    const TimeGrid grid = make_grid(state.time, spec.maturity, cfg);
    const double tau = spec.maturity;
    const double h = (tau - state.time) / grid.steps;
    const double h_fine = h / grid.draws;
    const OuStep step = ou_step(h_fine, p);
    const double sqrt_h_fine = std::sqrt(h_fine);
    const double orthogonal = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));

    // ln P(r, t_j; tau) = log_a[j] - r b[j] on the coarse grid.
    std::vector<double> log_a(grid.coarse.size());
    std::vector<double> b(grid.coarse.size());
    std::vector<double> step_var(static_cast<std::size_t>(grid.steps));
    for (std::size_t j = 0; j < grid.coarse.size(); ++j) {
        const BondContext ctx = bond_context(grid.coarse[j], tau, p);
        log_a[j] = std::log(ctx.a_factor);
        b[j] = ctx.b_factor;
        if (j + 1 < grid.coarse.size()) {
            step_var[j] = integrated_variance(grid.coarse[j], grid.coarse[j + 1], tau, p);
        }
    }

    const Monitor monitor(spec, cfg.monitoring);
    const double strike = spec.strike;
    const double half_var1 = 0.5 * p.sigma1 * p.sigma1;
    const auto path = [&](std::uint64_t i) {
        PathRandom rng(cfg.seed, i);
        double log_s = std::log(state.spot);
        double r = state.rate;
        double integral = 0.0;
        double x = x0;
        for (int j = 0; j < grid.steps; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double r_start = r;
            double w1 = 0.0;
            for (int k = 0; k < grid.draws; ++k) {
                const double z_rate = rng.normal();
                const double z_own = rng.normal();
                r = p.theta + (r - p.theta) * step.decay + step.scale * z_rate;
                w1 += sqrt_h_fine * (p.rho * z_rate + orthogonal * z_own);
            }
            log_s += (r_start - half_var1) * h + p.sigma1 * w1;
            integral += 0.5 * (r_start + r) * h;
            const double next = log_s - log_a[jj + 1] + r * b[jj + 1];
            if (monitor.knocked(x, next, step_var[jj], rng, static_cast<std::uint32_t>(j * grid.draws))) {
                return 0.0;
            }
            x = next;
        }
        return std::exp(-integral) * std::max(std::exp(log_s) - strike, 0.0);
    };
    const auto [mean, se] = run_paths(cfg, path);
    return make_estimate(mean, se, 1.0, cfg, grid.steps);
}

}  // namespace vbarrier
