#pragma once

#include <string>
#include <vector>

#include "vbarrier/mc_oracle.hpp"
#include "vbarrier/model.hpp"
#include "vbarrier/pricer.hpp"

// Self-checks run by `vbarrier verify`: closed forms against simulation,
// against the constant-rate reference, and against numerical integration.

namespace vbarrier {

struct VerifySettings {
    VasicekParams params;
    double strike = 100.0;
    double maturity = 1.0;
    double lower_barrier = 0.0;
    double upper_barrier = 0.0;
    MCConfig mc;
    BondFormula bond_formula = BondFormula::standard;
};

// Defaults at the reference parameter set: K = 100, barriers ln 100 and
// ln 130, a = 1, theta = 0.04, rho = 0.5, r0 = 0.05, sigma1 = sigma2 = 0.3.
VerifySettings default_verify_settings();

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CheckResult check_bond_vs_mc(const VerifySettings& s);
CheckResult check_bond_vs_ode(const VerifySettings& s);
CheckResult check_integrated_variance(const VerifySettings& s);
CheckResult check_constant_rate_reduction(const VerifySettings& s);
CheckResult check_chapman_kolmogorov(const VerifySettings& s);
CheckResult check_mc_single(const VerifySettings& s);
CheckResult check_mc_double(const VerifySettings& s);
// Pairwise ordering over a in {0.5, 1, 2} and theta in {0.02, 0.04, 0.08} on
// a 25-point grid from 85 to 128, both barrier kinds.
CheckResult check_monotonicity(const VerifySettings& s, CurveAxis axis = CurveAxis::spot);
CheckResult check_double_to_single_limit(const VerifySettings& s);

std::vector<CheckResult> run_verification(const VerifySettings& s);

// Bond price from integrating the affine-coefficient ODEs in time to
// maturity with classical RK4:
//   dB/ds = 1 - a B,   d ln A / ds = -a theta B + sigma2^2 B^2 / 2.
double bond_price_ode(double r, double s, const VasicekParams& p, int steps = 20000);

}  // namespace vbarrier
