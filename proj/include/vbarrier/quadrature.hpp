#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace vbarrier {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_panels = 4096;
};

struct QuadratureResult {
    double value = 0.0;
    double err_estimate = 0.0;
    int panels = 0;
};

// Thrown when the panel budget runs out before the tolerance is met.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, QuadratureResult best)
        : std::runtime_error(what), best_(best) {}
    const QuadratureResult& best_estimate() const noexcept { return best_; }

private:
    QuadratureResult best_;
};

// Globally adaptive 15-point Gauss-Legendre quadrature. Each panel's error is
// estimated by comparing the panel rule against the rule applied to its two
// halves; the worst panel is bisected until
//     err <= max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureSpec& spec = {});

// Fixed 15-point rule on [lo, hi] with no adaptivity.
double gauss_legendre_15(const std::function<double(double)>& f, double lo, double hi);

// Pairwise (cascade) summation; result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

}  // namespace vbarrier
