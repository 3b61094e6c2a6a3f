#include "vbarrier/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

namespace vbarrier {

namespace {

constexpr int kOrder = 15;

struct Rule {
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};
};

// Roots of P_15 by Newton iteration from Chebyshev-like guesses.
Rule make_rule() {
    Rule rule;
    for (int i = 0; i < kOrder; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= kOrder; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            derivative = kOrder * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / derivative;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
    }
    return rule;
}

const Rule& rule() {
    static const Rule r = make_rule();
    return r;
}

struct Panel {
    double lo;
    double hi;
    double coarse;  // rule over the whole panel
    double left;    // rule over [lo, mid]
    double right;   // rule over [mid, hi]
    double fine() const { return left + right; }
    double err() const { return std::abs(fine() - coarse); }
};

struct WorstFirst {
    bool operator()(const Panel& x, const Panel& y) const { return x.err() < y.err(); }
};

Panel make_panel(const std::function<double(double)>& f, double lo, double hi, double coarse) {
    const double mid = 0.5 * (lo + hi);
    return Panel{lo, hi, coarse, gauss_legendre_15(f, lo, mid), gauss_legendre_15(f, mid, hi)};
}

QuadratureResult summarize(const std::vector<Panel>& panels) {
    std::vector<double> values;
    std::vector<double> errors;
    values.reserve(panels.size());
    errors.reserve(panels.size());
    for (const Panel& p : panels) {
        values.push_back(p.fine());
        errors.push_back(p.err());
    }
    return QuadratureResult{pairwise_sum(values), pairwise_sum(errors),
                            static_cast<int>(panels.size())};
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double gauss_legendre_15(const std::function<double(double)>& f, double lo, double hi) {
    const Rule& r = rule();
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int i = 0; i < kOrder; ++i) {
        sum += r.weights[i] * f(center + half * r.nodes[i]);
    }
    return sum * half;
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureSpec& spec) {
    if (!(lo <= hi)) throw std::domain_error("integrate: lower limit exceeds upper limit");
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0) || spec.max_panels < 1) {
        throw std::invalid_argument("integrate: tolerances must be positive, max_panels >= 1");
    }
    if (lo == hi) return QuadratureResult{0.0, 0.0, 0};

    // Panels are kept in a heap keyed by error; ties and ordering do not
    // affect the result because the final sum is taken in interval order.
    std::priority_queue<Panel, std::vector<Panel>, WorstFirst> heap;
    heap.push(make_panel(f, lo, hi, gauss_legendre_15(f, lo, hi)));

    auto drain = [&heap]() {
        std::vector<Panel> panels;
        auto copy = heap;
        while (!copy.empty()) {
            panels.push_back(copy.top());
            copy.pop();
        }
        std::sort(panels.begin(), panels.end(),
                  [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
        return panels;
    };

    double total = heap.top().fine();
    double total_err = heap.top().err();
    while (true) {
        if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
            return summarize(drain());
        }
        if (static_cast<int>(heap.size()) >= spec.max_panels) {
            throw AccuracyError("integrate: tolerance not reached within max_panels",
                                summarize(drain()));
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(worst.lo < mid && mid < worst.hi)) {
            throw AccuracyError("integrate: panel width reached machine resolution",
                                summarize(drain()));
        }
        const Panel left = make_panel(f, worst.lo, mid, worst.left);
        const Panel right = make_panel(f, mid, worst.hi, worst.right);
        heap.push(left);
        heap.push(right);
        total += left.fine() + right.fine() - worst.fine();
        total_err += left.err() + right.err() - worst.err();
        // The running totals drift; resynchronise before deciding to stop.
        if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
            const QuadratureResult exact = summarize(drain());
            total = exact.value;
            total_err = exact.err_estimate;
        }
    }
}

}  // namespace vbarrier
