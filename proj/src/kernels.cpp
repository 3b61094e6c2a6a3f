#include "vbarrier/kernels.hpp"

#include <cmath>
#include <numbers>

namespace vbarrier {

namespace {

void require_positive_variance(double v, const char* who) {
    if (!(v > 0.0)) throw std::domain_error(std::string(who) + ": variance must be positive");
}

double drift_factor(double x, double x_prime, double v) {
    return std::exp(0.5 * (x - x_prime) - v / 8.0);
}

// Tail bound of the eigenfunction series from mode n onward.
double tail_bound(int n, double v, double width) {
    const double pn = n * std::numbers::pi / width;
    const double ratio_exponent =
        (2.0 * n + 1.0) * std::numbers::pi * std::numbers::pi * v / (2.0 * width * width);
    return (2.0 / width) * std::exp(-0.5 * pn * pn * v) / -std::expm1(-ratio_exponent);
}

}  // namespace

double free_kernel(double x, double x_prime, double v) {
    require_positive_variance(v, "free_kernel");
    const double d = x - x_prime;
    return drift_factor(x, x_prime, v) * std::exp(-d * d / (2.0 * v)) /
           std::sqrt(2.0 * std::numbers::pi * v);
}

double barrier_kernel(double x, double x_prime, double v, double barrier) {
    require_positive_variance(v, "barrier_kernel");
    if (x > barrier) throw std::domain_error("barrier_kernel: start point is beyond the barrier");
    if (x == barrier || x_prime >= barrier) return 0.0;
    // exp(-(x-x')^2/2v) - exp(-(x+x'-2B)^2/2v) = exp(-(x-x')^2/2v) (1 - exp(-2(B-x)(B-x')/v))
    const double image_ratio = 2.0 * (barrier - x) * (barrier - x_prime) / v;
    return free_kernel(x, x_prime, v) * -std::expm1(-image_ratio);
}

double eigenfunction(int n, double x, double lower, double upper) {
    if (n < 1) throw std::domain_error("eigenfunction: mode index must be >= 1");
    if (!(lower < upper)) throw std::domain_error("eigenfunction: lower barrier must be below upper");
    if (x <= lower || x >= upper) return 0.0;
    const double width = upper - lower;
    return std::sqrt(2.0 / width) * std::sin(n * std::numbers::pi * (x - lower) / width);
}

int series_terms(double v, double lower, double upper, const SeriesTruncation& trunc) {
    require_positive_variance(v, "series_terms");
    if (!(lower < upper)) throw std::domain_error("series_terms: lower barrier must be below upper");
    if (!(trunc.tol > 0.0) || trunc.max_terms < 1) {
        throw std::invalid_argument("series_terms: tol must be positive and max_terms >= 1");
    }
    const double width = upper - lower;
    for (int n = 1; n <= trunc.max_terms; ++n) {
        if (tail_bound(n, v, width) < trunc.tol) return n;
    }
    const double achieved = tail_bound(trunc.max_terms, v, width);
    throw TruncationError("double_barrier_kernel: series needs more than " +
                              std::to_string(trunc.max_terms) + " terms",
                          achieved);
}

double double_barrier_kernel(double x, double x_prime, double v, double lower, double upper,
                             const SeriesTruncation& trunc) {
    const int terms = series_terms(v, lower, upper, trunc);
    if (x < lower || x > upper) {
        throw std::domain_error("double_barrier_kernel: start point is outside the corridor");
    }
    if (x == lower || x == upper || x_prime <= lower || x_prime >= upper) return 0.0;

    const double width = upper - lower;
    const double k = std::numbers::pi / width;
    const double theta = k * (x - lower);
    const double theta_prime = k * (x_prime - lower);
    double sum = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double pn = n * k;
        sum += std::exp(-0.5 * pn * pn * v) * std::sin(n * theta) * std::sin(n * theta_prime);
    }
    return drift_factor(x, x_prime, v) * (2.0 / width) * sum;
}

}  // namespace vbarrier
