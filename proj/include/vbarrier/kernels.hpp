#pragma once

#include <stdexcept>
#include <string>

// Transition densities of the log forward price x = ln(S / P) over an
// accumulated variance v. All kernels carry the factor
//     exp((x - x') / 2) exp(-v / 8)
// that turns the symmetric heat kernel into the density of a driftless
// geometric forward.

namespace vbarrier {

struct SeriesTruncation {
    double tol = 1e-12;
    int max_terms = 100000;
};

// Thrown when the eigenfunction series needs more than max_terms modes.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double achieved_bound)
        : std::runtime_error(what), achieved_bound_(achieved_bound) {}
    double achieved_bound() const noexcept { return achieved_bound_; }

private:
    double achieved_bound_;
};

// Unrestricted lognormal transition density in log space.
double free_kernel(double x, double x_prime, double v);

// Up-and-out density by the method of images: the free Gaussian minus its
// mirror image across the log-barrier.
double barrier_kernel(double x, double x_prime, double v, double barrier);

// Sine modes of the corridor (lower, upper), orthonormal on that interval.
double eigenfunction(int n, double x, double lower, double upper);

// Number of modes the double-barrier series needs for `trunc.tol`.
int series_terms(double v, double lower, double upper, const SeriesTruncation& trunc);

// Double knock-out density as an eigenfunction expansion.
double double_barrier_kernel(double x, double x_prime, double v, double lower, double upper,
                             const SeriesTruncation& trunc = {});

}  // namespace vbarrier
