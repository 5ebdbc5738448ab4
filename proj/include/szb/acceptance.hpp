#pragma once

// The acceptance suite: ten numbered criteria with pinned grids and
// tolerances. Used by the `all` command and by the acceptance test binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "szb/analysis.hpp"
#include "szb/dunkl_core.hpp"
#include "szb/experiment.hpp"
#include "szb/moments_bounds.hpp"
#include "szb/operators.hpp"
#include "szb/special.hpp"
#include "szb/table_io.hpp"
#include "szb/test_function.hpp"

namespace szb::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    double measured = 0;
    double threshold = 0;
    std::int64_t checks = 0;
    std::int64_t failures = 0;
    bool pass = false;
    std::string detail;
};

struct Options {
    SeriesPolicy series{};
    QuadraturePolicy quad{};
    std::ostream* log = nullptr;  // progress and timings; never part of the table
};

namespace grid {

inline const std::vector<double> nus{0.0, 0.25, 0.5, 1.0, 2.5};
inline const std::vector<double> xs{0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0};

inline std::vector<int> orders(int lo, int hi) {
    std::vector<int> v;
    for (int n = lo; n <= hi; ++n) v.push_back(n);
    return v;
}

inline const std::vector<int> rate_ns{6, 7, 8, 10, 12, 16, 20, 25, 32, 40, 50, 64, 80};
inline const std::vector<int> fit_base{8, 16, 32, 64, 128};
inline const std::vector<int> fit_extended{8, 16, 32, 64, 128, 256};

} // namespace grid

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Tally {
    double worst = 0;
    std::int64_t checks = 0, failures = 0;
    std::string where;

    void see(double err, double tol, const std::string& at) {
        ++checks;
        if (!(err <= tol)) ++failures;
        if (std::isnan(worst)) return;
        if (std::isnan(err) || err > worst) {
            worst = err;
            where = at;
        }
    }
};

inline std::string point(double nu, int n, double x) {
    std::ostringstream os;
    os << "nu=" << nu << " n=" << n << " x=" << x;
    return os.str();
}

inline OperatorQuery query(const Options& o, int n, double x, double nu) {
    return OperatorQuery::make(n, x, nu, o.series, o.quad);
}

} // namespace detail

// 1. T_n(1; x) = 1 through the quadrature path.
inline CriterionResult normalization(const Options& o) {
    CriterionResult c{1, "normalization", 0, 1e-10};
    detail::Tally t;
    auto one = functions::constant(1.0);
    one.monomial.reset();  // force the kernel quadrature route
    for (int n : grid::orders(6, 80)) {
        IntegralCache cache;
        for (double nu : grid::nus)
            for (double x : grid::xs)
                t.see(std::fabs(szasz_beta_dunkl(detail::query(o, n, x, nu), one, &cache) - 1.0), c.threshold,
                      detail::point(nu, n, x));
    }
    c.measured = t.worst, c.checks = t.checks, c.failures = t.failures;
    c.pass = t.failures == 0;
    c.detail = "max |T_n(1;x)-1| over n=6..80, 9 x, 5 nu; worst at " + t.where;
    return c;
}

// 2. Recursion vs closed form of the Dunkl coefficients; gamma_0(r) = r!.
inline CriterionResult coefficient_consistency(const Options&) {
    CriterionResult c{2, "coefficient_consistency", 0, 1e-12};
    detail::Tally t;
    for (double nu : {0.0, 0.7, 2.5})
        t.see(gamma_nu_ratio_check(200, DunklParams::coefficients(nu)), 1e-12, "nu=" + detail::fmt(nu));
    const auto p0 = DunklParams::coefficients(0.0);
    double fact = 1;
    double worst_fact = 0;
    for (int r = 0; r <= 20; ++r) {
        if (r > 0) fact *= r;
        const double err = std::fabs(std::expm1(static_cast<double>(log_gamma_nu(r, p0).log_value) - std::log(fact)));
        worst_fact = std::max(worst_fact, err);
        ++t.checks;
        if (err > 1e-13) ++t.failures;
    }
    c.measured = t.worst, c.checks = t.checks, c.failures = t.failures;
    c.pass = t.failures == 0;
    c.detail = "max relative gap r<=200 for nu in {0,0.7,2.5}; gamma_0(r) vs r! max rel " + detail::fmt(worst_fact) +
               " (tol 1e-13, r<=20)";
    return c;
}

// 3. nu = 0 collapse: e_0 = exp, closed forms of T_n(s) and T_n(s^2).
inline CriterionResult collapse_oracles(const Options& o) {
    CriterionResult c{3, "nu0_collapse", 0, 1e-10};
    const auto p0 = DunklParams::coefficients(0.0);
    double worst_exp = 0;
    std::int64_t checks = 0, failures = 0;
    for (double y : numeric::lin_spaced(0.0, 30.0, 301)) {
        const double err = numeric::relative_difference(dunkl_exp(y, p0, o.series), std::exp(y));
        worst_exp = std::max(worst_exp, err);
        ++checks;
        if (err > 1e-12) ++failures;
    }
    detail::Tally t;
    auto s_quad = functions::power(1);
    s_quad.monomial.reset();
    auto s2_quad = functions::power(2);
    s2_quad.monomial.reset();
    const std::vector<int> quad_ns{6, 10, 20, 40, 80};
    for (int n : grid::orders(6, 80)) {
        IntegralCache cache;
        const bool with_quad = std::find(quad_ns.begin(), quad_ns.end(), n) != quad_ns.end();
        for (double x : grid::xs) {
            const double dn = n;
            const double e1 = dn * x / (dn - 2);
            const double e2 = (dn * dn * x * x + 2 * dn * x) / ((dn - 2) * (dn - 3));
            const auto q = detail::query(o, n, x, 0.0);
            const auto at = detail::point(0.0, n, x);
            t.see(numeric::relative_difference(szasz_beta_dunkl_monomial(q, 1), e1), c.threshold, at);
            t.see(numeric::relative_difference(szasz_beta_dunkl_monomial(q, 2), e2), c.threshold, at);
            if (with_quad) {
                t.see(numeric::relative_difference(szasz_beta_dunkl(q, s_quad, &cache), e1), c.threshold, at + " quad");
                t.see(numeric::relative_difference(szasz_beta_dunkl(q, s2_quad, &cache), e2), c.threshold, at + " quad");
            }
        }
    }
    c.measured = t.worst;
    c.checks = t.checks + checks;
    c.failures = t.failures + failures;
    c.pass = c.failures == 0;
    c.detail = "e_0 vs exp max rel " + detail::fmt(worst_exp) + " (tol 1e-12, y in [0,30]); T_n(s), T_n(s^2) max rel " +
               detail::fmt(t.worst) + " (tol 1e-10) worst at " + t.where;
    return c;
}

// 4. Kernel quadrature against B(r+m, n-m-1) / B(r, n-1).
inline CriterionResult quadrature_vs_beta(const Options& o) {
    CriterionResult c{4, "quadrature_vs_beta", 0, 1e-8};
    detail::Tally t;
    for (int m = 0; m <= 4; ++m) {
        auto g = functions::power(m);
        g.monomial.reset();
        for (int n = 2; n <= 60; ++n) {
            if (n <= m + 1) continue;
            for (int r = 1; r <= 40; ++r) {
                const KernelSpec k{r, n};
                const double got = kernel_expectation(k, g, o.quad).value;
                const double want = std::exp(kernel_moment_closed(k, m) - log_beta(r, n - 1));
                std::ostringstream at;
                at << "r=" << r << " n=" << n << " m=" << m;
                t.see(numeric::relative_difference(got, want), c.threshold, at.str());
            }
        }
    }
    c.measured = t.worst, c.checks = t.checks, c.failures = t.failures;
    c.pass = t.failures == 0;
    c.detail = "max relative error over r<=40, n<=60, m<=4, n>m+1; worst at " + t.where;
    return c;
}

// 5. Raw and central moment inequalities. Margin >= -1e-9 * scale counts as
// a pass; measured is the most negative normalized margin.
inline CriterionResult moment_inequalities(const Options& o) {
    CriterionResult c{5, "moment_inequalities", 0, -1e-9};
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    std::int64_t checks = 0, failures = 0, skipped = 0;
    auto tally = [&](const std::vector<BoundReport>& reps) {
        for (const auto& b : reps) {
            if (b.status == CheckStatus::skipped_domain) {
                ++skipped;
                continue;
            }
            ++checks;
            if (!b.pass()) ++failures;
            const double m = b.margin / std::max(1.0, std::fabs(b.rhs));
            if (m < worst) {
                worst = m;
                where = std::string(to_string(b.id)) + " " + detail::point(b.nu, b.n, b.x);
            }
        }
    };
    const std::vector<int> direct_ns{6, 7, 10, 20, 40, 80};
    for (int n : grid::orders(2, 80)) {
        IntegralCache cache;
        const bool direct = std::find(direct_ns.begin(), direct_ns.end(), n) != direct_ns.end();
        for (double nu : grid::nus)
            for (double x : grid::xs) {
                const auto q = detail::query(o, n, x, nu);
                tally(check_lemma2(q, &cache));
                tally(check_lemma3(q, &cache, direct));
            }
    }
    // near-tight points
    const auto tight101 = check_lemma2(detail::query(o, 4, 1.0, 0.0));
    const auto tight11 = check_lemma2(detail::query(o, 5, 1.0, 0.0));
    tally(tight101);
    tally(tight11);
    double m101 = 0, m11 = 0;
    for (const auto& b : tight101)
        if (b.id == InequalityId::L2_E101) m101 = b.margin;
    for (const auto& b : tight11)
        if (b.id == InequalityId::L2_E11) m11 = b.margin;
    c.measured = worst, c.checks = checks, c.failures = failures;
    c.pass = failures == 0;
    c.detail = "min normalized margin at " + where + "; tight margins E101(n=4)=" + detail::fmt(m101) +
               " E11(n=5)=" + detail::fmt(m11) + "; " + std::to_string(skipped) + " out-of-domain records skipped";
    return c;
}

// 6. Korovkin for e_2 on [0,5]: error at n = 400 below 0.1 and order 1 +- 0.15.
inline CriterionResult korovkin(const Options& o) {
    CriterionResult c{6, "korovkin_e2", 0, 0.1};
    KorovkinOptions ko;
    ko.target = 0.1;
    ko.target_n = 400;
    RateOptions ro;
    ro.series = o.series;
    ro.quad = o.quad;
    double worst_err = 0, worst_order_dev = 0;
    std::int64_t checks = 0, failures = 0;
    std::string orders;
    for (double nu : grid::nus) {
        const auto r = check_korovkin(2, {25, 50, 100, 200, 400}, nu, ko, ro);
        const double at400 = r.lhs.back();
        worst_err = std::max(worst_err, at400);
        ++checks;
        if (!(at400 < ko.target)) ++failures;
        const double dev = std::fabs(r.empirical_order - 1.0);
        worst_order_dev = std::max(worst_order_dev, dev);
        ++checks;
        if (!(dev <= 0.15)) ++failures;
        orders += (orders.empty() ? "" : ",") + detail::fmt(r.empirical_order);
    }
    c.measured = worst_err, c.checks = checks, c.failures = failures;
    c.pass = failures == 0;
    c.detail = "max_x |T_400(e_2)-x^2| worst over nu = " + detail::fmt(worst_err) + " (target < 0.1); orders " +
               orders + " (target 1 +- 0.15)";
    return c;
}

// 7. Weighted error of T_n(s) against (2 + 2 nu)/(n - 2) and its decay order.
inline CriterionResult weighted_convergence(const Options& o) {
    CriterionResult c{7, "weighted_convergence_s", 0, 0.9};
    RateOptions ro;
    ro.series = o.series;
    ro.quad = o.quad;
    const std::vector<int> ns{6, 8, 10, 12, 16, 20, 25, 32, 40, 50, 64, 80, 128, 256};
    double min_order = std::numeric_limits<double>::infinity();
    double worst_ratio = 0;
    std::int64_t checks = 0, failures = 0;
    std::string orders;
    for (double nu : grid::nus) {
        const auto r = check_weighted_convergence(functions::power(1), ns, nu, ro);
        orders += (orders.empty() ? "" : ",") + detail::fmt(r.empirical_order);
        for (std::size_t i = 0; i < r.lhs.size(); ++i) worst_ratio = std::max(worst_ratio, r.lhs[i] / r.rhs[i]);
        checks += static_cast<std::int64_t>(r.lhs.size()) + 1;
        failures += static_cast<std::int64_t>(r.violations);
        min_order = std::min(min_order, r.empirical_order);
        if (!(r.empirical_order >= 0.9)) ++failures;
    }
    c.measured = min_order, c.checks = checks, c.failures = failures;
    c.pass = failures == 0;
    c.detail = "empirical orders per nu " + orders + " (>= 0.9); max norm/bound ratio " +
               detail::fmt(worst_ratio) + " (<= 1)";
    return c;
}

// 8. Pointwise Lipschitz, modulus and C_B^2 rates over the corpus.
inline CriterionResult pointwise_rates(const Options& o) {
    CriterionResult c{8, "pointwise_rates", 0, 0};
    RateOptions ro;
    ro.series = o.series;
    ro.quad = o.quad;
    std::int64_t checks = 0, failures = 0, refinements = 0, diag_signed = 0, diag_proof = 0;
    std::string failed;
    double worst = -std::numeric_limits<double>::infinity();
    auto take = [&](const RateReport& r) {
        checks += static_cast<std::int64_t>(r.points.size());
        failures += static_cast<std::int64_t>(r.violations);
        refinements += static_cast<std::int64_t>(r.refinements);
        for (const auto& p : r.points) worst = std::max(worst, p.lhs - p.rhs);
        if (r.violations) failed += std::string(" ") + to_string(r.theorem_id) + ":" + r.function;
    };
    for (const auto& g : functions::builtin_corpus()) {
        IntegralCache cache;
        for (double nu : grid::nus) {
            if (g.lipschitz) take(check_lipschitz_rate(g, grid::rate_ns, grid::xs, nu, ro, &cache));
            if (g.uniformly_continuous && g.growth_degree <= 2) {
                const auto r = check_modulus_rate(g, grid::rate_ns, grid::xs, nu, ro, &cache);
                diag_proof += static_cast<std::int64_t>(r.diagnostic_violations);
                take(r);
            }
            if (g.in_cb2()) {
                const auto k = check_k_functional_rate(g, grid::rate_ns, grid::xs, nu, ro, &cache);
                diag_signed += static_cast<std::int64_t>(k.lemma8.diagnostic_violations);
                take(k.lemma8);
            }
        }
    }
    c.measured = worst, c.checks = checks, c.failures = failures;
    c.pass = failures == 0;
    c.detail = "max (lhs - rhs) over all points; " + std::to_string(refinements) + " modulus refinements; " +
               "diagnostics: signed chi_n violated at " + std::to_string(diag_signed) +
               " points, proof-form modulus factor violated at " + std::to_string(diag_proof) + " points" +
               (failed.empty() ? "" : "; failing:" + failed);
    return c;
}

// 9. Existential constants: finite and stable (< 20%) when n grows to 256.
inline CriterionResult fitted_constants(const Options& o) {
    CriterionResult c{9, "fitted_constant_stability", 0, 0.2};
    RateOptions ro;
    ro.series = o.series;
    ro.quad = o.quad;
    double worst = 0;
    std::string where;
    std::int64_t checks = 0, failures = 0;
    auto compare = [&](const RateReport& a, const RateReport& b) {
        const double d = constant_drift(a, b);
        ++checks;
        if (!(d < 0.2) || !a.pass || !b.pass) ++failures;
        if (!(d <= worst)) {
            worst = d;
            where = std::string(to_string(a.theorem_id)) + ":" + a.function + " nu=" + detail::fmt(a.nu);
        }
    };
    for (const auto& g : functions::builtin_corpus()) {
        IntegralCache cache;
        for (double nu : grid::nus) {
            if (g.bounded)
                compare(check_k_functional_rate(g, grid::fit_base, grid::xs, nu, ro, &cache).theorem9,
                        check_k_functional_rate(g, grid::fit_extended, grid::xs, nu, ro, &cache).theorem9);
            if (g.in_weighted_class())
                compare(check_weighted_modulus_rate(g, grid::fit_base, nu, ro, &cache),
                        check_weighted_modulus_rate(g, grid::fit_extended, nu, ro, &cache));
        }
    }
    c.measured = worst, c.checks = checks, c.failures = failures;
    c.pass = failures == 0;
    c.detail = "max relative drift of M* / M_nu* from n<=128 to n<=256" + (where.empty() ? "" : " at " + where);
    return c;
}

inline std::vector<std::function<CriterionResult(const Options&)>> numeric_criteria() {
    return {normalization, coefficient_consistency, collapse_oracles, quadrature_vs_beta, moment_inequalities,
            korovkin,      weighted_convergence,    pointwise_rates,  fitted_constants};
}

inline std::vector<CriterionResult> run_numeric(const Options& o) {
    std::vector<CriterionResult> out;
    for (const auto& f : numeric_criteria()) {
        const auto t0 = std::chrono::steady_clock::now();
        out.push_back(f(o));
        if (o.log) {
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *o.log << "  criterion " << out.back().id << " (" << out.back().name << ") "
                   << (out.back().pass ? "pass" : "FAIL") << " in " << detail::fmt(s) << " s\n";
        }
    }
    return out;
}

inline ResultTable to_table(const std::vector<CriterionResult>& rs, const Options& o) {
    ResultTable t{schema::acceptance(), {}};
    for (const auto& r : rs) {
        std::vector<Value> row{std::string("all"), static_cast<std::int64_t>(r.id), r.name, r.measured, r.threshold,
                               r.checks, r.failures, std::string(r.pass ? "pass" : "fail"), r.detail};
        append_fingerprint(row, o.series, o.quad);
        t.add(std::move(row));
    }
    return t;
}

// Small sweeps of every command, used for the round-trip half of 10.
inline std::vector<std::pair<Command, ResultTable>> sample_tables(const Options& o) {
    std::vector<std::pair<Command, ResultTable>> out;
    ExperimentConfig c;
    c.series = o.series;
    c.quad = o.quad;
    c.nu_list = {0.0, 0.5};
    c.n_list = {1, 4, 5, 8};
    c.x_list = {0.0, 0.3, 1.0, 2.0 / 3.0};
    for (auto [cmd, fn] : {std::pair{Command::eval, "exp_neg"}, std::pair{Command::moments, "one"},
                           std::pair{Command::bounds, "one"}, std::pair{Command::rates, "exp_neg"}}) {
        c.command = cmd;
        c.function_name = fn;
        auto r = run_sweep(c);
        out.emplace_back(cmd, std::move(r.table));
    }
    return out;
}

// 10. Two independent runs give byte-identical CSV and JSON; every table
// survives a write/parse/write cycle unchanged.
inline CriterionResult determinism(const Options& o, const std::vector<CriterionResult>& first) {
    CriterionResult c{10, "determinism_roundtrip", 0, 0};
    Options quiet = o;
    quiet.log = nullptr;
    const auto second = run_numeric(quiet);
    const auto t1 = to_table(first, o), t2 = to_table(second, o);
    std::int64_t checks = 0, failures = 0;
    std::string bad;
    auto expect = [&](bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            bad += " " + what;
        }
    };
    expect(to_csv(t1) == to_csv(t2), "acceptance-csv-bytes");
    expect(to_json(t1) == to_json(t2), "acceptance-json-bytes");

    auto tables = sample_tables(o);
    const auto again = sample_tables(o);
    tables.emplace_back(Command::all, t1);
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& [cmd, t] = tables[i];
        const std::string name = to_string(cmd);
        if (i < again.size()) expect(to_csv(t) == to_csv(again[i].second), name + "-rerun-bytes");
        for (auto f : {OutputFormat::csv, OutputFormat::json}) {
            const std::string text = serialize(t, f);
            const auto back = deserialize(text, f, cmd);
            const std::string tag = name + (f == OutputFormat::csv ? "-csv" : "-json");
            expect(same_table(t, back), tag + "-values");
            expect(serialize(back, f) == text, tag + "-bytes");
        }
    }
    c.measured = static_cast<double>(failures);
    c.checks = checks;
    c.failures = failures;
    c.pass = failures == 0;
    c.detail = "second full run plus write/parse/write of eval, moments, bounds, rates, all tables" +
               (bad.empty() ? std::string() : "; mismatches:" + bad);
    return c;
}

inline std::vector<CriterionResult> run_all(const Options& o) {
    auto rs = run_numeric(o);
    const auto t0 = std::chrono::steady_clock::now();
    rs.push_back(determinism(o, rs));
    if (o.log) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *o.log << "  criterion 10 (" << rs.back().name << ") " << (rs.back().pass ? "pass" : "FAIL") << " in "
               << detail::fmt(s) << " s\n";
    }
    return rs;
}

} // namespace szb::acceptance
