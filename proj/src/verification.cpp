#include "vbarrier/verification.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "vbarrier/constant_rate.hpp"
#include "vbarrier/kernels.hpp"
#include "vbarrier/quadrature.hpp"

namespace vbarrier {

namespace {

constexpr std::array<double, 4> kMcSpots = {90.0, 100.0, 110.0, 120.0};

template <class Body>
CheckResult timed(std::string name, Body body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = std::move(name);
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail += std::string(" error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

OptionSpec single_spec(const VerifySettings& s) {
    return OptionSpec{s.strike, s.maturity, BarrierKind::single_up, s.upper_barrier, 0.0};
}

OptionSpec double_spec(const VerifySettings& s) {
    return OptionSpec{s.strike, s.maturity, BarrierKind::double_knock_out, s.upper_barrier,
                      s.lower_barrier};
}

}  // namespace

VerifySettings default_verify_settings() {
    VerifySettings s;
    s.lower_barrier = std::log(100.0);
    s.upper_barrier = std::log(130.0);
    return s;
}

double bond_price_ode(double r, double s, const VasicekParams& p, int steps) {
    const double h = s / steps;
    const auto rhs = [&p](double b) {
        return std::array<double, 2>{1.0 - p.a * b,
                                     -p.a * p.theta * b + 0.5 * p.sigma2 * p.sigma2 * b * b};
    };
    double b = 0.0;
    double log_a = 0.0;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = rhs(b);
        const auto k2 = rhs(b + 0.5 * h * k1[0]);
        const auto k3 = rhs(b + 0.5 * h * k2[0]);
        const auto k4 = rhs(b + h * k3[0]);
        b += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        log_a += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    return std::exp(log_a - r * b);
}

CheckResult check_bond_vs_mc(const VerifySettings& s) {
    return timed("bond price vs Monte Carlo (3 s.e.)", [&](CheckResult& r) {
        const double closed = bond_price(s.params.r0, 0.0, s.maturity, s.params, s.bond_formula);
        const MCEstimate mc = bond_mc(s.params.r0, s.maturity, s.params, s.mc);
        const double gap = std::abs(closed - mc.mean);
        r.passed = gap <= 3.0 * mc.std_error;
        r.detail = "closed=" + fmt(closed) + " mc=" + fmt(mc.mean) + " se=" + fmt(mc.std_error) +
                   " gap/se=" + fmt(gap / mc.std_error);
    });
}

CheckResult check_bond_vs_ode(const VerifySettings& s) {
    return timed("bond price vs ODE solution (1e-8)", [&](CheckResult& r) {
        double worst = 0.0;
        for (double rate : {-0.02, 0.0, 0.05, 0.12}) {
            for (double horizon : {0.25, 1.0, 5.0}) {
                const double closed = bond_price(rate, 0.0, horizon, s.params, s.bond_formula);
                worst = std::max(worst, std::abs(closed - bond_price_ode(rate, horizon, s.params)));
            }
        }
        r.passed = worst <= 1e-8;
        r.detail = "max |closed - ode| = " + fmt(worst);
    });
}

CheckResult check_integrated_variance(const VerifySettings&) {
    return timed("integrated variance vs quadrature (1e-10 rel, 100 draws)", [&](CheckResult& r) {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> a_dist(0.01, 5.0);
        std::uniform_real_distribution<double> sigma_dist(0.0, 1.0);
        std::uniform_real_distribution<double> rho_dist(-1.0, 1.0);
        std::uniform_real_distribution<double> tau_dist(0.1, 10.0);
        const QuadratureSpec tight{1e-14, 1e-16, 4096};
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            VasicekParams p;
            p.a = a_dist(gen);
            p.sigma1 = sigma_dist(gen);
            p.sigma2 = sigma_dist(gen);
            p.rho = rho_dist(gen);
            const double tau = tau_dist(gen);
            const double closed = integrated_variance(0.0, tau, tau, p);
            const double numeric =
                integrate([&](double t) { return effective_vol_sq(t, tau, p); }, 0.0, tau, tight).value;
            if (numeric > 0.0) worst = std::max(worst, std::abs(closed - numeric) / numeric);
        }
        r.passed = worst <= 1e-10;
        r.detail = "max rel error = " + fmt(worst);
    });
}

CheckResult check_constant_rate_reduction(const VerifySettings& s) {
    return timed("constant-rate reduction vs closed form (1e-6 rel)", [&](CheckResult& r) {
        VasicekParams p = s.params;
        p.sigma2 = 0.0;
        p.theta = p.r0;
        const OptionSpec spec = single_spec(s);
        const double discount = std::exp(-p.r0 * s.maturity);
        const double variance = p.sigma1 * p.sigma1 * s.maturity;
        double worst = 0.0;
        for (double spot = 80.0; spot <= 125.0 + 1e-9; spot += 5.0) {
            const double model = price_single_barrier(MarketState{spot, p.r0, 0.0}, spec, p).price;
            const double reference = up_and_out_call_forward(
                spot / discount, s.strike, std::exp(s.upper_barrier), variance, discount);
            const double err = reference == 0.0 ? std::abs(model)
                                                : std::abs(model - reference) / reference;
            worst = std::max(worst, err);
        }
        r.passed = worst <= 1e-6;
        r.detail = "max rel error = " + fmt(worst);
    });
}

CheckResult check_chapman_kolmogorov(const VerifySettings& s) {
    return timed("Chapman-Kolmogorov composition (1e-8 abs, 50 pairs)", [&](CheckResult& r) {
        const double split = 0.4 * s.maturity;
        const double v1 = integrated_variance(0.0, split, s.maturity, s.params);
        const double v2 = integrated_variance(split, s.maturity, s.maturity, s.params);
        const double total = v1 + v2;
        const double sd = std::sqrt(total);
        const double lower = s.lower_barrier;
        const double upper = s.upper_barrier;
        const QuadratureSpec quad{1e-12, 1e-14, 4096};
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> single_pt(upper - 4.0 * sd, upper);
        std::uniform_real_distribution<double> corridor_pt(lower, upper);
        double worst_single = 0.0;
        double worst_double = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = single_pt(gen);
            const double xp = single_pt(gen);
            const double composed =
                integrate([&](double z) {
                    return barrier_kernel(x, z, v1, upper) * barrier_kernel(z, xp, v2, upper);
                }, std::min(x, xp) - 12.0 * sd, upper, quad).value;
            worst_single =
                std::max(worst_single, std::abs(composed - barrier_kernel(x, xp, total, upper)));

            const double y = corridor_pt(gen);
            const double yp = corridor_pt(gen);
            const double composed_d =
                integrate([&](double z) {
                    return double_barrier_kernel(y, z, v1, lower, upper) *
                           double_barrier_kernel(z, yp, v2, lower, upper);
                }, lower, upper, quad).value;
            worst_double = std::max(
                worst_double, std::abs(composed_d - double_barrier_kernel(y, yp, total, lower, upper)));
        }
        r.passed = worst_single <= 1e-8 && worst_double <= 1e-8;
        r.detail = "single max err = " + fmt(worst_single) + ", double max err = " + fmt(worst_double);
    });
}

CheckResult check_mc_single(const VerifySettings& s) {
    return timed("single barrier vs forward-measure MC (3 s.e.)", [&](CheckResult& r) {
        const OptionSpec spec = single_spec(s);
        r.passed = true;
        for (double spot : kMcSpots) {
            const MarketState state{spot, s.params.r0, 0.0};
            const double analytic = price_single_barrier(state, spec, s.params).price;
            const MCEstimate mc = price_barrier_mc(state, spec, s.params, s.mc);
            const bool ok = std::abs(analytic - mc.mean) <= 3.0 * mc.std_error;
            r.passed = r.passed && ok;
            r.detail += " S=" + fmt(spot) + ": " + fmt(analytic) + " vs " + fmt(mc.mean) + "+-" +
                        fmt(mc.std_error) + (ok ? "" : " FAIL") + ";";
        }
    });
}

CheckResult check_mc_double(const VerifySettings& s) {
    return timed("double barrier vs both MC oracles (3 s.e.)", [&](CheckResult& r) {
        const OptionSpec spec = double_spec(s);
        r.passed = true;
        for (double spot : kMcSpots) {
            const MarketState state{spot, s.params.r0, 0.0};
            const double analytic = price_double_barrier(state, spec, s.params).price;
            const MCEstimate fwd = price_barrier_mc(state, spec, s.params, s.mc);
            const MCEstimate two = price_barrier_mc_two_factor(state, spec, s.params, s.mc);
            const double combined = std::hypot(fwd.std_error, two.std_error);
            const bool ok = std::abs(analytic - fwd.mean) <= 3.0 * fwd.std_error &&
                            std::abs(fwd.mean - two.mean) <= 3.0 * combined;
            r.passed = r.passed && ok;
            r.detail += " S=" + fmt(spot) + ": " + fmt(analytic) + " vs " + fmt(fwd.mean) + "+-" +
                        fmt(fwd.std_error) + " / 2f " + fmt(two.mean) + "+-" + fmt(two.std_error) +
                        (ok ? "" : " FAIL") + ";";
        }
    });
}

CheckResult check_monotonicity(const VerifySettings& s, CurveAxis axis) {
    const std::string label = axis == CurveAxis::spot ? "spot" : "forward";
    return timed("price monotone in a (up) and theta (down), " + label + " axis",
                 [&](CheckResult& r) {
        std::vector<double> grid;
        for (int i = 0; i < 25; ++i) grid.push_back(85.0 + (128.0 - 85.0) * i / 24.0);
        int total = 0;
        for (const OptionSpec& spec : {single_spec(s), double_spec(s)}) {
            const auto sweep = [&](auto set, std::array<double, 3> values) {
                std::vector<PriceCurve> curves;
                for (double v : values) {
                    VasicekParams p = s.params;
                    set(p, v);
                    curves.push_back(price_curve(grid, spec, p, {}, {}, axis));
                }
                return curves;
            };
            const auto by_a = sweep([](VasicekParams& p, double v) { p.a = v; }, {0.5, 1.0, 2.0});
            const auto by_theta =
                sweep([](VasicekParams& p, double v) { p.theta = v; }, {0.02, 0.04, 0.08});
            int a_bad = 0;
            int theta_bad = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (std::size_t k = 0; k + 1 < 3; ++k) {
                    if (by_a[k].rows[i].price > by_a[k + 1].rows[i].price) ++a_bad;
                    if (by_theta[k].rows[i].price < by_theta[k + 1].rows[i].price) ++theta_bad;
                }
            }
            const std::string kind = spec.kind == BarrierKind::single_up ? "single" : "double";
            r.detail += " " + kind + "/a: " + std::to_string(a_bad) + ", " + kind +
                        "/theta: " + std::to_string(theta_bad) + ";";
            total += a_bad + theta_bad;
        }
        r.passed = total == 0;
        r.detail = std::to_string(total) + " ordering violations (" + r.detail.substr(1) + ")";
    });
}

CheckResult check_double_to_single_limit(const VerifySettings& s) {
    return timed("double barrier with remote lower wall vs single (1e-6 rel)", [&](CheckResult& r) {
        OptionSpec wide = double_spec(s);
        wide.lower_barrier = wide.upper_barrier - 25.0;
        const OptionSpec single = single_spec(s);
        double worst = 0.0;
        for (double spot : kMcSpots) {
            const MarketState state{spot, s.params.r0, 0.0};
            const double a = price_double_barrier(state, wide, s.params).price;
            const double b = price_single_barrier(state, single, s.params).price;
            worst = std::max(worst, b == 0.0 ? std::abs(a) : std::abs(a - b) / b);
        }
        r.passed = worst <= 1e-6;
        r.detail = "max rel gap = " + fmt(worst);
    });
}

std::vector<CheckResult> run_verification(const VerifySettings& s) {
    return {check_constant_rate_reduction(s), check_integrated_variance(s),
            check_bond_vs_ode(s),             check_bond_vs_mc(s),
            check_chapman_kolmogorov(s),      check_double_to_single_limit(s),
            check_monotonicity(s, CurveAxis::spot),
            check_monotonicity(s, CurveAxis::forward),
            check_mc_single(s),
            check_mc_double(s)};
}

}  // namespace vbarrier
