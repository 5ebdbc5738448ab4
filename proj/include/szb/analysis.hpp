#pragma once

// Grid estimators for the moduli of smoothness and numerical checks of the
// convergence-rate statements for T_n (Korovkin, weighted convergence,
// Lipschitz, modulus, K-functional and weighted-modulus rates).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "szb/errors.hpp"
#include "szb/moments_bounds.hpp"
#include "szb/numeric.hpp"
#include "szb/operators.hpp"
#include "szb/test_function.hpp"

namespace szb {

// ---------------------------------------------------------------------------
// moduli

struct ModulusEstimate {
    double delta = 0;
    double value = 0;
    double domain_cap = 0;
    double grid_step = 0;
};

namespace detail {

inline constexpr double pair_tolerance = 1e-12;

inline void require_modulus_args(double delta, double B, double step) {
    if (!(delta > 0) || !std::isfinite(delta)) throw DomainError("modulus: delta must be finite and > 0");
    if (!(B > delta) || !std::isfinite(B)) throw DomainError("modulus: domain cap B must exceed delta");
    if (!(step > 0) || step > delta / 10.0 * (1.0 + pair_tolerance))
        throw DomainError("modulus: grid step must lie in (0, delta/10]");
}

// Grid spacing that divides delta exactly, so offsets of delta are on the grid.
inline std::size_t offsets_per_delta(double delta, double step) {
    return static_cast<std::size_t>(std::ceil(delta / step * (1.0 - pair_tolerance)));
}

inline std::vector<double> sample(const TestFunction& g, double h, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = g(static_cast<double>(i) * h);
    return v;
}

} // namespace detail

// Max of |g(s) - g(t)| over grid pairs in [0, B] with |s - t| <= delta. A
// lower estimate of the true sup; refining the step can only raise it.
[[nodiscard]] inline ModulusEstimate modulus(const TestFunction& g, double delta, double B = 20.0,
                                             double step = 0.0) {
    if (step == 0.0) step = delta / 10.0;
    detail::require_modulus_args(delta, B, step);
    const std::size_t K = detail::offsets_per_delta(delta, step);
    const double h = delta / static_cast<double>(K);
    const auto M = static_cast<std::size_t>(std::floor(B / h * (1.0 + detail::pair_tolerance)));
    std::vector<double> s(M + 1);
    for (std::size_t i = 0; i <= M; ++i) s[i] = static_cast<double>(i) * h;
    if (B - s.back() > detail::pair_tolerance * B) s.push_back(B);
    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = g(s[i]);

    double best = 0;
    const double reach = delta * (1.0 + detail::pair_tolerance);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size() && s[j] - s[i] <= reach; ++j)
            best = std::max(best, std::fabs(v[j] - v[i]));
    return {delta, best, B, h};
}

// sup over 0 < t <= delta and x in [0, B - 2 delta] of
// |g(x + 2t) - 2 g(x + t) + g(x)|.
[[nodiscard]] inline ModulusEstimate second_modulus(const TestFunction& g, double delta, double B = 20.0,
                                                    double step = 0.0) {
    if (step == 0.0) step = delta / 10.0;
    detail::require_modulus_args(delta, B, step);
    const std::size_t K = detail::offsets_per_delta(delta, step);
    const double h = delta / static_cast<double>(K);
    const auto M = static_cast<std::size_t>(std::floor(B / h * (1.0 + detail::pair_tolerance)));
    const auto v = detail::sample(g, h, M + 1);
    double best = 0;
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t i = 0; i + 2 * k <= M; ++i)
            best = std::max(best, std::fabs(v[i + 2 * k] - 2.0 * v[i + k] + v[i]));
    return {delta, best, B, h};
}

// sup over x in [0, B], |h| <= delta, x + h >= 0 of
// |g(x + h) - g(x)| / ((1 + h^2)(1 + x^2)).
[[nodiscard]] inline ModulusEstimate weighted_modulus(const TestFunction& g, double delta, double B = 20.0,
                                                      double step = 0.0) {
    if (step == 0.0) step = delta / 10.0;
    detail::require_modulus_args(delta, B, step);
    const std::size_t K = detail::offsets_per_delta(delta, step);
    const double h = delta / static_cast<double>(K);
    const auto M = static_cast<std::size_t>(std::floor(B / h * (1.0 + detail::pair_tolerance)));
    const auto v = detail::sample(g, h, M + K + 1);
    std::vector<double> hw(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double t = static_cast<double>(k) * h;
        hw[k] = 1.0 / (1.0 + t * t);
    }
    double best = 0;
    for (std::size_t i = 0; i <= M; ++i) {
        const double x = static_cast<double>(i) * h;
        const double xw = 1.0 / (1.0 + x * x);
        double local = 0;
        for (std::size_t k = 1; k <= K; ++k) {
            local = std::max(local, std::fabs(v[i + k] - v[i]) * hw[k]);
            if (k <= i) local = std::max(local, std::fabs(v[i - k] - v[i]) * hw[k]);
        }
        best = std::max(best, local * xw);
    }
    return {delta, best, B, h};
}

// sup |g| + sup |g'| + sup |g''| sampled on [0, B].
[[nodiscard]] inline double cb2_norm(const TestFunction& g, double B = 20.0, double step = 1e-3) {
    if (!g.in_cb2()) throw DomainError("function '" + g.label + "' is not in C_B^2 (needs bounded g, g', g'')");
    double a = 0, b = 0, c = 0;
    const auto M = static_cast<std::size_t>(std::ceil(B / step));
    for (std::size_t i = 0; i <= M; ++i) {
        const double s = static_cast<double>(i) * step;
        a = std::max(a, std::fabs(g(s)));
        b = std::max(b, std::fabs(g.d1(s)));
        c = std::max(c, std::fabs(g.d2(s)));
    }
    return a + b + c;
}

[[nodiscard]] inline double sup_norm(const TestFunction& g, double B = 20.0, double step = 1e-3) {
    double a = 0;
    const auto M = static_cast<std::size_t>(std::ceil(B / step));
    for (std::size_t i = 0; i <= M; ++i) a = std::max(a, std::fabs(g(static_cast<double>(i) * step)));
    return a;
}

// ---------------------------------------------------------------------------
// rate reports

enum class TheoremId { T4, T5, T6, T7, L8, T9, T10 };

inline const char* to_string(TheoremId id) {
    switch (id) {
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
    case TheoremId::T6: return "T6";
    case TheoremId::T7: return "T7";
    case TheoremId::L8: return "L8";
    case TheoremId::T9: return "T9";
    case TheoremId::T10: return "T10";
    }
    return "?";
}

struct RatePoint {
    int n = 0;
    double x = 0;
    double lhs = 0, rhs = 0;
    bool pass = true;
};

struct RateReport {
    TheoremId theorem_id{};
    std::string function;
    double nu = 0;
    std::vector<int> n_grid;
    // Per n: the sup of lhs (sup-type checks) or the grid point with the
    // smallest margin (pointwise checks).
    std::vector<double> lhs, rhs;
    std::vector<RatePoint> points;
    std::optional<double> fitted_constant;
    // (x, constant) when the fit is also done per evaluation point.
    std::vector<std::pair<double, double>> per_x_constant;
    double empirical_order = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::size_t violations = 0;
    std::size_t skipped = 0;
    // Count of failures under an alternative reading of the statement.
    std::size_t diagnostic_violations = 0;
    std::size_t refinements = 0;
    std::vector<std::string> notes;
};

// Least-squares slope of ln(err) against ln(n), negated, after dropping the
// two smallest n. Non-positive errors are left out.
[[nodiscard]] inline double empirical_order(std::vector<int> ns, std::vector<double> errs) {
    std::vector<std::pair<int, double>> pts;
    for (std::size_t i = 0; i < ns.size() && i < errs.size(); ++i) pts.emplace_back(ns[i], errs[i]);
    std::sort(pts.begin(), pts.end());
    if (pts.size() > 3) pts.erase(pts.begin(), pts.begin() + 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (auto [n, e] : pts) {
        if (!(e > 0) || !std::isfinite(e)) continue;
        const double lx = std::log(static_cast<double>(n)), ly = std::log(e);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, k += 1;
    }
    if (k < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = k * sxx - sx * sx;
    if (den == 0) return std::numeric_limits<double>::quiet_NaN();
    return -(k * sxy - sx * sy) / den;
}

// Relative change of a fitted constant when the n grid is extended.
[[nodiscard]] inline double constant_drift(const RateReport& base, const RateReport& extended) {
    if (!base.fitted_constant || !extended.fitted_constant) return std::numeric_limits<double>::infinity();
    const double a = *base.fitted_constant, b = *extended.fitted_constant;
    if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
    if (a == 0 && b == 0) return 0;
    return std::fabs(b - a) / std::max(std::fabs(a), std::fabs(b));
}

namespace detail {

inline double rate_slack(double rhs) { return bound_slack(rhs); }

struct PerN {
    double lhs = 0, rhs = 0;
    double margin = std::numeric_limits<double>::infinity();
    bool any = false;
};

inline void add_point(RateReport& rep, PerN& acc, int n, double x, double lhs, double rhs) {
    const bool ok = rhs - lhs >= -rate_slack(rhs);
    rep.points.push_back({n, x, lhs, rhs, ok});
    if (!ok) ++rep.violations;
    if (!acc.any || rhs - lhs < acc.margin) {
        acc.margin = rhs - lhs;
        acc.lhs = lhs;
        acc.rhs = rhs;
        acc.any = true;
    }
}

inline void close_n(RateReport& rep, int n, const PerN& acc) {
    if (!acc.any) return;
    rep.n_grid.push_back(n);
    rep.lhs.push_back(acc.lhs);
    rep.rhs.push_back(acc.rhs);
}

inline std::vector<int> sorted_unique(std::vector<int> ns) {
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

inline std::vector<double> weighted_grid(double cap, std::size_t points) {
    std::vector<double> xs{0.0};
    for (double x : numeric::log_spaced(1e-2, cap, points)) xs.push_back(x);
    return xs;
}

inline OperatorQuery query(int n, double x, double nu, const SeriesPolicy& s, const QuadraturePolicy& q) {
    return OperatorQuery::make(n, x, nu, s, q);
}

} // namespace detail

struct RateOptions {
    SeriesPolicy series{};
    QuadraturePolicy quad{};
    double modulus_cap = 20.0;       // B for unweighted moduli
    double weighted_cap = 1e3;       // B_far for weighted norms
    double weighted_modulus_cap = 100.0;
    std::size_t weighted_points = 61;
    int max_refinements = 4;
};

// ---------------------------------------------------------------------------
// T4: max over A of |T_n(e_i; x) - x^i|, monotone in n and below a target.

struct KorovkinOptions {
    double a = 0.0, b = 5.0;
    std::size_t points = 101;
    double target = 1e-2;
    int target_n = 200;
};

[[nodiscard]] inline RateReport check_korovkin(int i, const std::vector<int>& n_grid, double nu,
                                               const KorovkinOptions& ko = {}, const RateOptions& ro = {}) {
    if (i < 0 || i > 2) throw DomainError("Korovkin test functions are e_0, e_1, e_2");
    if (!(ko.b > ko.a) || ko.a < 0) throw DomainError("Korovkin interval must satisfy 0 <= a < b");
    RateReport rep;
    rep.theorem_id = TheoremId::T4;
    rep.function = functions::power(i).label;
    rep.nu = nu;
    const auto xs = numeric::lin_spaced(ko.a, ko.b, ko.points);
    for (int n : detail::sorted_unique(n_grid)) {
        if (n <= i + 1) {
            ++rep.skipped;
            continue;
        }
        double worst = 0;
        for (double x : xs) {
            const double v = szasz_beta_dunkl_monomial(detail::query(n, x, nu, ro.series, ro.quad), i);
            worst = std::max(worst, std::fabs(v - std::pow(x, i)));
        }
        rep.n_grid.push_back(n);
        rep.lhs.push_back(worst);
        rep.rhs.push_back(i == 0 ? 1e-10 : ko.target);
    }
    rep.empirical_order = empirical_order(rep.n_grid, rep.lhs);
    if (i == 0) {
        for (double e : rep.lhs)
            if (e > 1e-10) ++rep.violations;
        rep.pass = rep.violations == 0 && !rep.n_grid.empty();
        return rep;
    }
    bool monotone = true;
    for (std::size_t k = 1; k < rep.lhs.size(); ++k)
        if (rep.lhs[k] > rep.lhs[k - 1] * (1 + 1e-9) + 1e-13) monotone = false;
    if (!monotone) rep.notes.push_back("max error not monotone in n");
    std::optional<double> at_target;
    for (std::size_t k = 0; k < rep.n_grid.size(); ++k)
        if (rep.n_grid[k] == ko.target_n) at_target = rep.lhs[k];
    if (!at_target && !rep.lhs.empty()) at_target = rep.lhs.back();
    std::ostringstream os;
    os.precision(6);
    if (at_target) {
        os << "error at target n " << *at_target << " vs target " << ko.target;
        rep.notes.push_back(os.str());
        if (*at_target > ko.target) ++rep.violations;
    }
    if (!monotone) ++rep.violations;
    rep.pass = rep.violations == 0 && at_target.has_value();
    return rep;
}

// ---------------------------------------------------------------------------
// T5: ||T_n g - g||_rho on a log grid up to B_far.

// Explicit majorants of the weighted error for g = 1, s, s^2.
[[nodiscard]] inline std::optional<double> weighted_error_bound(const TestFunction& g, int n, double nu) {
    if (!g.monomial) return std::nullopt;
    const double dn = n;
    switch (*g.monomial) {
    case 0: return 1e-10;
    case 1: return n > 2 ? std::optional<double>((2.0 + 2.0 * nu) / (dn - 2)) : std::nullopt;
    case 2:
        if (n <= 3) return std::nullopt;
        return ((5 * dn - 6) + (2 * nu * dn + dn) + (4 * nu * nu + 6 * nu)) / (dn * dn - 5 * dn + 6);
    default: return std::nullopt;
    }
}

[[nodiscard]] inline RateReport check_weighted_convergence(const TestFunction& g, const std::vector<int>& n_grid,
                                                           double nu, const RateOptions& ro = {},
                                                           IntegralCache* cache = nullptr) {
    if (!g.in_weighted_class()) throw DomainError("weighted convergence needs growth degree <= 2");
    RateReport rep;
    rep.theorem_id = TheoremId::T5;
    rep.function = g.label;
    rep.nu = nu;
    IntegralCache local;
    if (!cache) cache = &local;
    const auto xs = detail::weighted_grid(ro.weighted_cap, ro.weighted_points);
    bool have_bound = true;
    for (int n : detail::sorted_unique(n_grid)) {
        if (n <= g.growth_degree + 1) {
            ++rep.skipped;
            continue;
        }
        double sup = 0;
        for (double x : xs) {
            const auto q = detail::query(n, x, nu, ro.series, ro.quad);
            sup = std::max(sup, std::fabs(apply_operator(q, g, cache) - g(x)) / (1.0 + x * x));
        }
        const auto bound = weighted_error_bound(g, n, nu);
        if (!bound) have_bound = false;
        rep.n_grid.push_back(n);
        rep.lhs.push_back(sup);
        rep.rhs.push_back(bound.value_or(std::numeric_limits<double>::quiet_NaN()));
        if (bound && sup > *bound + detail::rate_slack(*bound)) ++rep.violations;
    }
    rep.empirical_order = empirical_order(rep.n_grid, rep.lhs);
    if (!have_bound) {
        // No explicit majorant: require the norm to shrink along the grid.
        if (rep.lhs.size() >= 2 && !(rep.lhs.back() < rep.lhs.front())) ++rep.violations;
        rep.notes.push_back("no explicit majorant; checked decrease only");
    }
    rep.pass = rep.violations == 0 && !rep.n_grid.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// T6: |T_n g - g| <= M Psi_2^(alpha/2) for g in Lip_M(alpha).

[[nodiscard]] inline RateReport check_lipschitz_rate(const TestFunction& g, const std::vector<int>& n_grid,
                                                     const std::vector<double>& x_grid, double nu,
                                                     const RateOptions& ro = {}, IntegralCache* cache = nullptr) {
    if (!g.lipschitz) throw DomainError("function '" + g.label + "' carries no Lipschitz metadata");
    if (lipschitz_ratio(g) > 1.0 + 1e-9)
        throw DomainError("Lipschitz metadata of '" + g.label + "' is contradicted by sampling");
    const auto [M, alpha] = *g.lipschitz;
    RateReport rep;
    rep.theorem_id = TheoremId::T6;
    rep.function = g.label;
    rep.nu = nu;
    IntegralCache local;
    if (!cache) cache = &local;
    for (int n : detail::sorted_unique(n_grid)) {
        if (n < 4 || n <= g.growth_degree + 1) {
            rep.skipped += x_grid.size();
            continue;
        }
        detail::PerN acc;
        for (double x : x_grid) {
            const auto q = detail::query(n, x, nu, ro.series, ro.quad);
            const double lhs = std::fabs(apply_operator(q, g, cache) - g(x));
            const double rhs = M * std::pow(std::max(0.0, psi2(q)), alpha / 2.0);
            detail::add_point(rep, acc, n, x, lhs, rhs);
        }
        detail::close_n(rep, n, acc);
    }
    rep.empirical_order = empirical_order(rep.n_grid, rep.lhs);
    rep.pass = rep.violations == 0 && !rep.points.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// T7: |T_n g - g| <= (1 + sqrt(9x^2 + (8nu n - 12nu + 2n)/(n-2) x)) w(g; 1/sqrt(n)).

[[nodiscard]] inline double modulus_rate_factor(int n, double x, double nu) {
    return 1.0 + std::sqrt(bound_rhs::psi2_rate_form(n, x, nu));
}

// Same factor with delta = 1/sqrt(n) kept inside the Psi_2 majorant.
[[nodiscard]] inline double modulus_rate_factor_proof_form(int n, double x, double nu) {
    return 1.0 + std::sqrt(static_cast<double>(n) * bound_rhs::psi2(n, x, nu));
}

[[nodiscard]] inline RateReport check_modulus_rate(const TestFunction& g, const std::vector<int>& n_grid,
                                                   const std::vector<double>& x_grid, double nu,
                                                   const RateOptions& ro = {}, IntegralCache* cache = nullptr) {
    if (!g.uniformly_continuous || g.growth_degree > 2)
        throw DomainError("modulus rate needs a uniformly continuous g with growth degree <= 2");
    RateReport rep;
    rep.theorem_id = TheoremId::T7;
    rep.function = g.label;
    rep.nu = nu;
    IntegralCache local;
    if (!cache) cache = &local;
    for (int n : detail::sorted_unique(n_grid)) {
        if (n < 4 || n <= g.growth_degree + 1) {
            rep.skipped += x_grid.size();
            continue;
        }
        const double delta = 1.0 / std::sqrt(static_cast<double>(n));
        double step = delta / 10.0;
        double omega = modulus(g, delta, ro.modulus_cap, step).value;
        detail::PerN acc;
        for (double x : x_grid) {
            const auto q = detail::query(n, x, nu, ro.series, ro.quad);
            const double lhs = std::fabs(apply_operator(q, g, cache) - g(x));
            const double factor = modulus_rate_factor(n, x, nu);
            for (int k = 0; lhs > factor * omega + detail::rate_slack(factor * omega) && k < ro.max_refinements;
                 ++k) {
                step /= 2;
                omega = std::max(omega, modulus(g, delta, ro.modulus_cap, step).value);
                ++rep.refinements;
            }
            if (lhs > modulus_rate_factor_proof_form(n, x, nu) * omega + detail::rate_slack(omega))
                ++rep.diagnostic_violations;
            detail::add_point(rep, acc, n, x, lhs, factor * omega);
        }
        detail::close_n(rep, n, acc);
    }
    if (rep.diagnostic_violations)
        rep.notes.push_back("proof-form factor violated at " + std::to_string(rep.diagnostic_violations) +
                            " points");
    rep.empirical_order = empirical_order(rep.n_grid, rep.lhs);
    rep.pass = rep.violations == 0 && !rep.points.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// L8 and T9. chi_n = |Psi_1| + Psi_2; the signed Psi_1 variant is tallied in
// diagnostic_violations of the L8 report.

struct KFunctionalReports {
    RateReport lemma8;
    RateReport theorem9;
};

[[nodiscard]] inline KFunctionalReports check_k_functional_rate(const TestFunction& g,
                                                                const std::vector<int>& n_grid,
                                                                const std::vector<double>& x_grid, double nu,
                                                                const RateOptions& ro = {},
                                                                IntegralCache* cache = nullptr) {
    if (!g.bounded) throw DomainError("K-functional rate needs a bounded g");
    KFunctionalReports out;
    auto& l8 = out.lemma8;
    auto& t9 = out.theorem9;
    l8.theorem_id = TheoremId::L8;
    t9.theorem_id = TheoremId::T9;
    l8.function = t9.function = g.label;
    l8.nu = t9.nu = nu;
    const bool do_l8 = g.in_cb2();
    const double norm2 = do_l8 ? cb2_norm(g, ro.modulus_cap) : 0.0;
    const double norm0 = sup_norm(g, ro.modulus_cap);
    if (!do_l8) l8.notes.push_back("g is not in C_B^2; the C_B^2 estimate is not checked");
    IntegralCache local;
    if (!cache) cache = &local;

    double fit = 0;
    std::map<double, double> per_x;
    for (int n : detail::sorted_unique(n_grid)) {
        if (n < 4) {
            l8.skipped += x_grid.size();
            t9.skipped += x_grid.size();
            continue;
        }
        detail::PerN acc8;
        double worst9 = 0, bracket_at_worst = 0;
        for (double x : x_grid) {
            const auto q = detail::query(n, x, nu, ro.series, ro.quad);
            const double lhs = std::fabs(apply_operator(q, g, cache) - g(x));
            const double p1 = psi1(q), p2 = std::max(0.0, psi2(q));
            const double chi = std::fabs(p1) + p2;
            if (do_l8) {
                const double rhs = chi * norm2;
                detail::add_point(l8, acc8, n, x, lhs, rhs);
                const double rhs_signed = (p1 + p2) * norm2;
                if (rhs_signed - lhs < -detail::rate_slack(rhs_signed)) ++l8.diagnostic_violations;
            }
            const double d = std::sqrt(chi / 2.0);
            double w2 = 0;
            if (d > 0) {
                const double cap = std::max(ro.modulus_cap, 4.0 * d);
                w2 = second_modulus(g, d, cap).value;
            }
            const double bracket = std::min(1.0, chi / 2.0) * norm0 + w2;
            double ratio = 0;
            if (bracket > 0)
                ratio = lhs / (2.0 * bracket);
            else if (lhs > 1e-12)
                ratio = std::numeric_limits<double>::infinity();
            t9.points.push_back({n, x, lhs, bracket, true});
            fit = std::max(fit, ratio);
            per_x[x] = std::max(per_x[x], ratio);
            if (ratio >= worst9) {
                worst9 = ratio;
                bracket_at_worst = bracket;
            }
        }
        if (do_l8) detail::close_n(l8, n, acc8);
        t9.n_grid.push_back(n);
        t9.lhs.push_back(worst9);
        t9.rhs.push_back(bracket_at_worst);
    }
    if (do_l8) {
        l8.empirical_order = empirical_order(l8.n_grid, l8.lhs);
        l8.pass = l8.violations == 0 && !l8.points.empty();
        if (l8.diagnostic_violations)
            l8.notes.push_back("signed chi_n violated at " + std::to_string(l8.diagnostic_violations) + " points");
    }
    t9.fitted_constant = fit;
    for (auto [x, c] : per_x) t9.per_x_constant.emplace_back(x, c);
    t9.pass = std::isfinite(fit) && !t9.points.empty();
    return out;
}

// ---------------------------------------------------------------------------
// T10: sup_x |T_n g - g| / (1 + x^2)^3 against (1 + 1/n) Omega(g; 1/sqrt(n)).

[[nodiscard]] inline RateReport check_weighted_modulus_rate(const TestFunction& g, const std::vector<int>& n_grid,
                                                            double nu, const RateOptions& ro = {},
                                                            IntegralCache* cache = nullptr) {
    if (!g.in_weighted_class()) throw DomainError("weighted modulus rate needs growth degree <= 2");
    RateReport rep;
    rep.theorem_id = TheoremId::T10;
    rep.function = g.label;
    rep.nu = nu;
    IntegralCache local;
    if (!cache) cache = &local;
    const auto xs = detail::weighted_grid(ro.weighted_modulus_cap, ro.weighted_points);
    double fit = 0;
    std::vector<double> ratios;
    for (int n : detail::sorted_unique(n_grid)) {
        if (n <= 6) {
            ++rep.skipped;
            continue;
        }
        double sup = 0;
        for (double x : xs) {
            const auto q = detail::query(n, x, nu, ro.series, ro.quad);
            const double w = 1.0 + x * x;
            sup = std::max(sup, std::fabs(apply_operator(q, g, cache) - g(x)) / (w * w * w));
        }
        const double factor = (1.0 + 1.0 / n) * weighted_modulus(g, 1.0 / std::sqrt(static_cast<double>(n)),
                                                                   ro.modulus_cap)
                                                      .value;
        double ratio = 0;
        if (factor > 0)
            ratio = sup / factor;
        else if (sup > 1e-12)
            ratio = std::numeric_limits<double>::infinity();
        fit = std::max(fit, ratio);
        rep.n_grid.push_back(n);
        rep.lhs.push_back(sup);
        rep.rhs.push_back(factor);
    }
    if (rep.skipped) rep.notes.push_back("n <= 6 skipped (fourth central moment bound needs n > 6)");
    rep.fitted_constant = fit;
    rep.empirical_order = empirical_order(rep.n_grid, rep.lhs);
    rep.pass = std::isfinite(fit) && !rep.n_grid.empty();
    return rep;
}

} // namespace szb
