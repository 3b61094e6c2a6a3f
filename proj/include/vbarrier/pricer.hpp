#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vbarrier/kernels.hpp"
#include "vbarrier/model.hpp"
#include "vbarrier/quadrature.hpp"

namespace vbarrier {

enum class BarrierKind { single_up, double_knock_out };

// Contract terms. Barriers are levels of ln(S / P), the log forward price.
struct OptionSpec {
    double strike = 100.0;
    double maturity = 1.0;
    BarrierKind kind = BarrierKind::single_up;
    double upper_barrier = 0.0;  // B for single_up, B2 for double_knock_out
    double lower_barrier = 0.0;  // B1, double_knock_out only

    void validate() const;
};

struct MarketState {
    double spot = 100.0;
    double rate = 0.05;
    double time = 0.0;
};

struct PriceResult {
    double price = 0.0;
    bool knocked_out = false;
};

double log_forward(const MarketState& state, const OptionSpec& spec, const VasicekParams& p);

PriceResult price_single_barrier(const MarketState& state, const OptionSpec& spec,
                                 const VasicekParams& p, const QuadratureSpec& quad = {});

PriceResult price_double_barrier(const MarketState& state, const OptionSpec& spec,
                                 const VasicekParams& p, const QuadratureSpec& quad = {},
                                 const SeriesTruncation& trunc = {});

// Dispatches on spec.kind.
PriceResult price(const MarketState& state, const OptionSpec& spec, const VasicekParams& p,
                  const QuadratureSpec& quad = {}, const SeriesTruncation& trunc = {});

struct CurveRow {
    double spot = 0.0;
    double price = 0.0;
    bool knocked_out = false;
    std::optional<std::string> error;
};

// What the curve's grid values denote. `forward` treats each grid value as
// the forward price S / P(r0, 0; T) and converts it to a spot before pricing.
enum class CurveAxis { spot, forward };

struct PriceCurve {
    VasicekParams params;
    OptionSpec spec;
    CurveAxis axis = CurveAxis::spot;
    std::vector<CurveRow> rows;  // CurveRow::spot holds the grid value
};

// Prices every grid point at t = 0, r = p.r0. A failing point records its
// error and a zero price; the rest of the curve is still computed.
PriceCurve price_curve(std::span<const double> grid, const OptionSpec& spec,
                       const VasicekParams& p, const QuadratureSpec& quad = {},
                       const SeriesTruncation& trunc = {}, CurveAxis axis = CurveAxis::spot);

}  // namespace vbarrier
