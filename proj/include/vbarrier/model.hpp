#pragma once

// Closed-form Vasicek quantities used by the barrier pricers.
//
// Short rate:   dr = a (theta - r) dt + sigma2 dW2
// Stock:        dS / S = r dt + sigma1 dW1,   d<W1, W2> = rho dt
//
// The forward price S / P(r, t; tau) is driftless under the tau-forward
// measure with instantaneous variance
//     sigma_hat^2(t) = sigma1^2 + 2 rho sigma1 sigma2 B(t) + sigma2^2 B(t)^2.

namespace vbarrier {

struct VasicekParams {
    double a = 1.0;       // mean-reversion speed (1/year)
    double theta = 0.04;  // long-term mean rate
    double sigma1 = 0.3;  // stock volatility
    double sigma2 = 0.3;  // short-rate volatility
    double rho = 0.5;     // correlation of the two drivers
    double r0 = 0.05;     // initial short rate

    // Throws std::invalid_argument on negative volatilities or |rho| > 1.
    void validate() const;
};

// Below this |a| the Taylor branch of b_factor is used.
inline constexpr double kSmallMeanReversion = 1e-6;

// Selects the A(t) factor of the bond formula. `printed_variant` reproduces a
// known mis-grouped form of the affine coefficient and exists only so the
// verification suite can demonstrate that it disagrees with simulation.
enum class BondFormula { standard, printed_variant };

struct BondContext {
    double t = 0.0;
    double tau = 0.0;
    double b_factor = 0.0;
    double a_factor = 1.0;
};

// B(t) = (1 - exp(-a (tau - t))) / a.
double b_factor(double t, double tau, double a);

BondContext bond_context(double t, double tau, const VasicekParams& p,
                         BondFormula formula = BondFormula::standard);

// Zero-coupon bond P(r, t; tau) = A(t) exp(-r B(t)).
double bond_price(double r, double t, double tau, const VasicekParams& p,
                  BondFormula formula = BondFormula::standard);

// ln P(r, t; tau); avoids the exp/log round trip in the simulators.
double log_bond_price(double r, double t, double tau, const VasicekParams& p,
                      BondFormula formula = BondFormula::standard);

// sigma_hat^2(t), the instantaneous variance of the log forward price.
double effective_vol_sq(double t, double tau, const VasicekParams& p);

// Integral of effective_vol_sq over [t0, t1], closed form.
double integrated_variance(double t0, double t1, double tau, const VasicekParams& p);

namespace detail {

// Primitives in time-to-maturity s, all vanishing at s = 0:
//   int_0^s B(u) du     = (s - B(s)) / a
//   int_0^s B(u)^2 du   = (s - 2 B(s) + B(s; 2a)) / a^2
// Evaluated by power series when |a s| is small.
double integral_b(double s, double a);
double integral_b_sq(double s, double a);

}  // namespace detail

}  // namespace vbarrier
