#include "vbarrier/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vbarrier {

namespace {

// Below this |a s| the primitives switch to their power series.
constexpr double kSeriesThreshold = 0.1;
constexpr int kSeriesTerms = 24;

void require_ordered(double lo, double hi, const char* what) {
    if (!(lo <= hi)) {
        throw std::domain_error(std::string(what) + ": time " + std::to_string(lo) +
                                " is after " + std::to_string(hi));
    }
}

// (1 - exp(-a s)) / a without cancellation for small a s.
double discount_primitive(double s, double a) {
    if (std::abs(a) < kSmallMeanReversion) {
        return s - a * s * s / 2.0 + a * a * s * s * s / 6.0;
    }
    return -std::expm1(-a * s) / a;
}

}  // namespace

void VasicekParams::validate() const {
    if (!(sigma1 >= 0.0)) throw std::invalid_argument("sigma1 must be non-negative");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be non-negative");
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
    if (!std::isfinite(a) || !std::isfinite(theta) || !std::isfinite(r0)) {
        throw std::invalid_argument("a, theta and r0 must be finite");
    }
}

namespace detail {

double integral_b(double s, double a) {
    const double u = a * s;
    if (std::abs(u) < kSeriesThreshold) {
        // s^2 * sum_{k>=1} (-u)^{k-1} / (k+1)!
        double term = 0.5;  // k = 1
        double sum = term;
        for (int k = 2; k <= kSeriesTerms; ++k) {
            term *= -u / (k + 1);
            sum += term;
        }
        return s * s * sum;
    }
    return (s - discount_primitive(s, a)) / a;
}

double integral_b_sq(double s, double a) {
    const double u = a * s;
    if (std::abs(u) < kSeriesThreshold) {
        // s^3 * sum_{k>=2} (-u)^{k-2} (2^k - 2) / (k+1)!
        double power = 1.0;      // (-u)^{k-2}
        double factorial = 6.0;  // (k+1)!
        double two_k = 4.0;      // 2^k
        double sum = 0.0;
        for (int k = 2; k <= kSeriesTerms; ++k) {
            sum += power * (two_k - 2.0) / factorial;
            power *= -u;
            factorial *= k + 2;
            two_k *= 2.0;
        }
        return s * s * s * sum;
    }
    return (s - 2.0 * discount_primitive(s, a) + discount_primitive(s, 2.0 * a)) / (a * a);
}

}  // namespace detail

double b_factor(double t, double tau, double a) {
    require_ordered(t, tau, "b_factor");
    return discount_primitive(tau - t, a);
}

BondContext bond_context(double t, double tau, const VasicekParams& p, BondFormula formula) {
    require_ordered(t, tau, "bond_context");
    const double s = tau - t;
    const double b = discount_primitive(s, p.a);
    double log_a = 0.0;
    if (formula == BondFormula::standard) {
        // ln A = -a theta int B + sigma2^2 / 2 int B^2, identical to
        // ((B - s)(a^2 theta - sigma2^2 / 2)) / a^2 - sigma2^2 B^2 / (4a).
        log_a = -p.a * p.theta * detail::integral_b(s, p.a) +
                0.5 * p.sigma2 * p.sigma2 * detail::integral_b_sq(s, p.a);
    } else {
        const double s2 = p.sigma2 * p.sigma2;
        log_a = (b * b - s) / (p.a * p.a) *
                (p.a * p.a * p.theta - s2 / 2.0 - s2 / (4.0 * p.a) * b * b);
    }
    return BondContext{t, tau, b, std::exp(log_a)};
}

double log_bond_price(double r, double t, double tau, const VasicekParams& p,
                      BondFormula formula) {
    const BondContext ctx = bond_context(t, tau, p, formula);
    return std::log(ctx.a_factor) - r * ctx.b_factor;
}

double bond_price(double r, double t, double tau, const VasicekParams& p, BondFormula formula) {
    const BondContext ctx = bond_context(t, tau, p, formula);
    return ctx.a_factor * std::exp(-r * ctx.b_factor);
}

double effective_vol_sq(double t, double tau, const VasicekParams& p) {
    const double b = b_factor(t, tau, p.a);
    // (sigma1 + rho sigma2 B)^2 + (1 - rho^2) sigma2^2 B^2, non-negative by construction.
    const double aligned = p.sigma1 + p.rho * p.sigma2 * b;
    const double orthogonal = (1.0 - p.rho * p.rho) * p.sigma2 * p.sigma2 * b * b;
    return aligned * aligned + orthogonal;
}

double integrated_variance(double t0, double t1, double tau, const VasicekParams& p) {
    require_ordered(t0, t1, "integrated_variance");
    require_ordered(t1, tau, "integrated_variance");
    const double s_near = tau - t1;
    const double s_far = tau - t0;
    const double ib = detail::integral_b(s_far, p.a) - detail::integral_b(s_near, p.a);
    const double ib2 = detail::integral_b_sq(s_far, p.a) - detail::integral_b_sq(s_near, p.a);
    return p.sigma1 * p.sigma1 * (s_far - s_near) + 2.0 * p.rho * p.sigma1 * p.sigma2 * ib +
           p.sigma2 * p.sigma2 * ib2;
}

}  // namespace vbarrier
