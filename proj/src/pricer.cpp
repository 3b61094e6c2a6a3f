#include "vbarrier/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbarrier {

namespace {

// Integration windows extend this many standard deviations past the
// kernel's centre; the Gaussian mass left outside is below exp(-72).
constexpr double kWindowSds = 12.0;

void validate_state(const MarketState& state, const OptionSpec& spec) {
    if (!(state.spot > 0.0)) throw std::invalid_argument("spot must be positive");
    if (!(state.time <= spec.maturity)) throw std::domain_error("valuation time is after maturity");
}

}  // namespace

void OptionSpec::validate() const {
    if (!(strike > 0.0)) throw std::invalid_argument("strike must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
    if (!std::isfinite(upper_barrier)) throw std::invalid_argument("barrier must be finite");
    if (kind == BarrierKind::double_knock_out && !(lower_barrier < upper_barrier)) {
        throw std::invalid_argument("lower barrier must be below the upper barrier");
    }
}

double log_forward(const MarketState& state, const OptionSpec& spec, const VasicekParams& p) {
    return std::log(state.spot) - log_bond_price(state.rate, state.time, spec.maturity, p);
}

PriceResult price_single_barrier(const MarketState& state, const OptionSpec& spec,
                                 const VasicekParams& p, const QuadratureSpec& quad) {
    if (spec.kind != BarrierKind::single_up) {
        throw std::invalid_argument("price_single_barrier: option is not a single up barrier");
    }
    spec.validate();
    p.validate();
    validate_state(state, spec);

    const double x = log_forward(state, spec, p);
    const double barrier = spec.upper_barrier;
    if (x >= barrier) return PriceResult{0.0, true};

    const double log_strike = std::log(spec.strike);
    if (log_strike >= barrier) return PriceResult{0.0, false};

    const double discount = bond_price(state.rate, state.time, spec.maturity, p);
    const double variance = integrated_variance(state.time, spec.maturity, spec.maturity, p);
    if (variance <= 0.0) {
        return PriceResult{discount * std::max(std::exp(x) - spec.strike, 0.0), false};
    }

    const double lo = std::max(log_strike, x - 0.5 * variance - kWindowSds * std::sqrt(variance));
    if (lo >= barrier) return PriceResult{0.0, false};
    const double strike = spec.strike;
    const auto integrand = [&](double xp) {
        return barrier_kernel(x, xp, variance, barrier) * (std::exp(xp) - strike);
    };
    return PriceResult{discount * integrate(integrand, lo, barrier, quad).value, false};
}

PriceResult price_double_barrier(const MarketState& state, const OptionSpec& spec,
                                 const VasicekParams& p, const QuadratureSpec& quad,
                                 const SeriesTruncation& trunc) {
    if (spec.kind != BarrierKind::double_knock_out) {
        throw std::invalid_argument("price_double_barrier: option is not a double barrier");
    }
    spec.validate();
    p.validate();
    validate_state(state, spec);

    const double x = log_forward(state, spec, p);
    const double lower = spec.lower_barrier;
    const double upper = spec.upper_barrier;
    if (x <= lower || x >= upper) return PriceResult{0.0, true};

    const double log_strike = std::log(spec.strike);
    if (log_strike >= upper) return PriceResult{0.0, false};

    const double discount = bond_price(state.rate, state.time, spec.maturity, p);
    const double variance = integrated_variance(state.time, spec.maturity, spec.maturity, p);
    if (variance <= 0.0) {
        return PriceResult{discount * std::max(std::exp(x) - spec.strike, 0.0), false};
    }

    const double window = x - 0.5 * variance - kWindowSds * std::sqrt(variance);
    const double lo = std::max({log_strike, lower, window});
    if (lo >= upper) return PriceResult{0.0, false};
    const double strike = spec.strike;
    const auto integrand = [&](double xp) {
        return double_barrier_kernel(x, xp, variance, lower, upper, trunc) * (std::exp(xp) - strike);
    };
    return PriceResult{discount * integrate(integrand, lo, upper, quad).value, false};
}

PriceResult price(const MarketState& state, const OptionSpec& spec, const VasicekParams& p,
                  const QuadratureSpec& quad, const SeriesTruncation& trunc) {
    if (spec.kind == BarrierKind::single_up) return price_single_barrier(state, spec, p, quad);
    return price_double_barrier(state, spec, p, quad, trunc);
}

PriceCurve price_curve(std::span<const double> grid, const OptionSpec& spec,
                       const VasicekParams& p, const QuadratureSpec& quad,
                       const SeriesTruncation& trunc, CurveAxis axis) {
    if (grid.empty()) throw std::invalid_argument("price_curve: grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i - 1] < grid[i])) {
            throw std::invalid_argument("price_curve: grid must be strictly increasing");
        }
    }
    PriceCurve curve{p, spec, axis, {}};
    curve.rows.reserve(grid.size());
    for (double value : grid) {
        CurveRow row{value, 0.0, false, std::nullopt};
        try {
            const double spot =
                axis == CurveAxis::spot ? value : value * bond_price(p.r0, 0.0, spec.maturity, p);
            const PriceResult r = price(MarketState{spot, p.r0, 0.0}, spec, p, quad, trunc);
            row.price = r.price;
            row.knocked_out = r.knocked_out;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        curve.rows.push_back(std::move(row));
    }
    return curve;
}

}  // namespace vbarrier
