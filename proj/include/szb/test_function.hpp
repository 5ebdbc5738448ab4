#pragma once

// Black-box test functions on [0, inf) with the metadata the convergence
// theorems need: polynomial growth degree, Lipschitz constants, C_B^2
// derivatives, boundedness.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "szb/errors.hpp"
#include "szb/numeric.hpp"

namespace szb {

struct Lipschitz {
    double M = 1.0;
    double alpha = 1.0;
};

struct TestFunction {
    using Fn = std::function<double(double)>;

    std::string label;
    Fn eval;
    // |g(s)| <= C (1 + s^growth_degree) on [0, inf).
    int growth_degree = 0;
    std::optional<Lipschitz> lipschitz;
    // Set when g(s) = s^m exactly; enables the closed-form moment path.
    std::optional<int> monomial;
    bool bounded = false;
    bool uniformly_continuous = false;
    // First and second derivatives, present for members of C_B^2.
    Fn d1;
    Fn d2;

    [[nodiscard]] double operator()(double s) const { return eval(s); }
    [[nodiscard]] bool in_cb2() const { return bounded && d1 && d2; }
    // g(x) / (1 + x^2) has a finite limit at infinity.
    [[nodiscard]] bool in_weighted_class() const { return growth_degree <= 2; }
};

namespace functions {

[[nodiscard]] inline TestFunction constant(double c) {
    std::ostringstream os;
    os.precision(17);
    os << "const(" << c << ")";
    TestFunction g{os.str(), [c](double) { return c; }, 0};
    if (c == 1.0) g.label = "one";
    g.lipschitz = Lipschitz{1.0, 1.0};
    g.monomial = c == 1.0 ? std::optional<int>(0) : std::nullopt;
    g.bounded = true;
    g.uniformly_continuous = true;
    g.d1 = [](double) { return 0.0; };
    g.d2 = [](double) { return 0.0; };
    return g;
}

[[nodiscard]] inline TestFunction power(int m) {
    if (m < 0) throw DomainError("monomial degree must be >= 0");
    if (m == 0) return constant(1.0);
    TestFunction g{m == 1 ? "s" : "s" + std::to_string(m),
                   [m](double s) { return m == 1 ? s : std::pow(s, m); }, m};
    g.monomial = m;
    if (m == 1) {
        g.lipschitz = Lipschitz{1.0, 1.0};
        g.uniformly_continuous = true;
    }
    return g;
}

[[nodiscard]] inline TestFunction exp_neg() {
    TestFunction g{"exp_neg", [](double s) { return std::exp(-s); }, 0};
    g.lipschitz = Lipschitz{1.0, 1.0};
    g.bounded = true;
    g.uniformly_continuous = true;
    g.d1 = [](double s) { return -std::exp(-s); };
    g.d2 = [](double s) { return std::exp(-s); };
    return g;
}

[[nodiscard]] inline TestFunction sqrt_fn() {
    TestFunction g{"sqrt", [](double s) { return std::sqrt(s); }, 1};
    g.lipschitz = Lipschitz{1.0, 0.5};
    g.uniformly_continuous = true;
    return g;
}

[[nodiscard]] inline TestFunction abs_shift(double a = 1.0) {
    TestFunction g{a == 1.0 ? "abs_s_minus_1" : "abs_shift", [a](double s) { return std::fabs(s - a); }, 1};
    g.lipschitz = Lipschitz{1.0, 1.0};
    g.uniformly_continuous = true;
    return g;
}

// s^2 / (1 + s^2): bounded, in C_B^2, Lipschitz with M = 3 sqrt(3) / 8.
[[nodiscard]] inline TestFunction saturating_square() {
    TestFunction g{"s2_over_1_plus_s2", [](double s) { return s * s / (1.0 + s * s); }, 0};
    g.lipschitz = Lipschitz{3.0 * std::sqrt(3.0) / 8.0 + 1e-12, 1.0};
    g.bounded = true;
    g.uniformly_continuous = true;
    g.d1 = [](double s) {
        const double d = 1.0 + s * s;
        return 2.0 * s / (d * d);
    };
    g.d2 = [](double s) {
        const double d = 1.0 + s * s;
        return (2.0 - 6.0 * s * s) / (d * d * d);
    };
    return g;
}

// s^2 / (1 + s): linear growth, derivative 1 - (1 + s)^-2 in [0, 1).
[[nodiscard]] inline TestFunction square_over_linear() {
    TestFunction g{"s2_over_1_plus_s", [](double s) { return s * s / (1.0 + s); }, 1};
    g.lipschitz = Lipschitz{1.0, 1.0};
    g.uniformly_continuous = true;
    return g;
}

[[nodiscard]] inline TestFunction linear_combination(double a, const TestFunction& g, double b,
                                                     const TestFunction& h) {
    std::ostringstream os;
    os.precision(17);
    os << a << "*" << g.label << "+" << b << "*" << h.label;
    TestFunction out{os.str(), [a, b, ge = g.eval, he = h.eval](double s) { return a * ge(s) + b * he(s); },
                     std::max(g.growth_degree, h.growth_degree)};
    return out;
}

// Every function the experiment runner knows by name.
[[nodiscard]] inline std::vector<TestFunction> builtin_corpus() {
    return {constant(1.0), power(1),          power(2),          power(3),
            power(4),      exp_neg(),         sqrt_fn(),         abs_shift(1.0),
            saturating_square(), square_over_linear()};
}

[[nodiscard]] inline TestFunction builtin(const std::string& name) {
    for (auto& g : builtin_corpus())
        if (g.label == name) return g;
    throw ConfigInvalid("unknown built-in function '" + name + "'");
}

} // namespace functions

struct GrowthCheck {
    double near_max = 0;  // sup |g|/(1+x^d) on [0, 100]
    double far_max = 0;   // sup |g|/(1+x^d) on [100, 1000]
    bool honest = false;
};

// Samples |g(x)| / (1 + x^d) up to x = 1000. A declared degree that is too
// small shows up as a ratio that keeps growing past x = 100.
[[nodiscard]] inline GrowthCheck validate_growth(const TestFunction& g, std::size_t samples = 400) {
    GrowthCheck out;
    const double d = g.growth_degree;
    auto ratio = [&](double x) { return std::fabs(g(x)) / (1.0 + std::pow(x, d)); };
    out.near_max = ratio(0.0);
    for (double x : numeric::log_spaced(1e-3, 100.0, samples)) out.near_max = std::max(out.near_max, ratio(x));
    for (double x : numeric::log_spaced(100.0, 1000.0, samples)) out.far_max = std::max(out.far_max, ratio(x));
    out.honest = std::isfinite(out.near_max) && std::isfinite(out.far_max) &&
                 out.far_max <= 2.0 * out.near_max + 1e-12;
    return out;
}

// Largest |g(s) - g(t)| / (M |s - t|^alpha) over grid pairs on [0, B]; the
// metadata is consistent when this stays <= 1.
[[nodiscard]] inline double lipschitz_ratio(const TestFunction& g, double B = 20.0, double step = 0.01,
                                            std::size_t max_offset = 200) {
    if (!g.lipschitz) throw DomainError("function '" + g.label + "' carries no Lipschitz metadata");
    const auto [M, alpha] = *g.lipschitz;
    const auto n = static_cast<std::size_t>(std::floor(B / step));
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = g(static_cast<double>(i) * step);
    double worst = 0;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t k = 1; k <= max_offset && i + k <= n; ++k) {
            const double dist = static_cast<double>(k) * step;
            worst = std::max(worst, std::fabs(values[i + k] - values[i]) / (M * std::pow(dist, alpha)));
        }
    return worst;
}

} // namespace szb
