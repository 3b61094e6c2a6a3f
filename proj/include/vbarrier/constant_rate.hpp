#pragma once

// Constant-rate reference prices. With sigma2 = 0 and theta = r0 the short
// rate never moves, the forward F = S exp(r (T - t)) is a driftless
// geometric Brownian motion, and the knock-out level is a fixed level on F.

namespace vbarrier {

// Undiscounted Black call on a forward.
double black_call(double forward, double strike, double total_variance);

// Up-and-out call on a driftless lognormal forward with a continuously
// monitored level `barrier` (a price, not a log), times `discount`.
// Zero when forward >= barrier or strike >= barrier.
double up_and_out_call_forward(double forward, double strike, double barrier,
                               double total_variance, double discount);

}  // namespace vbarrier
