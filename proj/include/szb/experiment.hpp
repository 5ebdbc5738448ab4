#pragma once

// Experiment runner: a JSON config names a command, parameter grids, a test
// function and policy overrides; run() produces one deterministic table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "szb/analysis.hpp"
#include "szb/errors.hpp"
#include "szb/moments_bounds.hpp"
#include "szb/operators.hpp"
#include "szb/policy.hpp"
#include "szb/table_io.hpp"
#include "szb/test_function.hpp"

namespace szb {

enum class Command { eval, moments, bounds, rates, all };
enum class OutputFormat { csv, json };

inline const char* to_string(Command c) {
    switch (c) {
    case Command::eval: return "eval";
    case Command::moments: return "moments";
    case Command::bounds: return "bounds";
    case Command::rates: return "rates";
    case Command::all: return "all";
    }
    return "?";
}

[[nodiscard]] inline Command command_from_string(const std::string& s) {
    if (s == "eval") return Command::eval;
    if (s == "moments") return Command::moments;
    if (s == "bounds") return Command::bounds;
    if (s == "rates") return Command::rates;
    if (s == "all") return Command::all;
    throw ConfigInvalid("unknown command '" + s + "' (expected eval, moments, bounds, rates or all)");
}

[[nodiscard]] inline OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigInvalid("unknown output format '" + s + "' (expected csv or json)");
}

struct ExperimentConfig {
    Command command = Command::eval;
    std::vector<double> nu_list{0.0};
    std::vector<int> n_list{10};
    std::vector<double> x_list{1.0};
    std::string function_name = "one";
    // Path of a sampled table; overrides function_name when set.
    std::optional<std::filesystem::path> function_table;
    SeriesPolicy series{};
    QuadraturePolicy quad{};
    std::string output_path;  // empty: standard output
    OutputFormat output_format = OutputFormat::csv;

    void validate() const {
        if (nu_list.empty() || n_list.empty() || x_list.empty())
            throw ConfigInvalid("nu_list, n_list and x_list must be non-empty");
        for (double nu : nu_list)
            if (!(nu >= 0) || !std::isfinite(nu)) throw ConfigInvalid("every nu must be finite and >= 0");
        for (int n : n_list)
            if (n < 1) throw ConfigInvalid("every n must be a positive integer");
        for (double x : x_list)
            if (!(x >= 0) || !std::isfinite(x)) throw ConfigInvalid("every x must be finite and >= 0");
        try {
            series.validate();
            quad.validate();
        } catch (const DomainError& e) {
            throw ConfigInvalid(e.what());
        }
    }

    [[nodiscard]] TestFunction function() const {
        if (function_table) return load_sampled_function(*function_table);
        return functions::builtin(function_name);
    }
};

namespace detail {

template <typename T>
std::vector<T> read_list(const nlohmann::json& j, const char* key) {
    if (!j.is_array()) throw ConfigInvalid(std::string(key) + " must be an array");
    std::vector<T> out;
    for (const auto& v : j) {
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigInvalid(std::string(key) + " entries must be integers");
        } else {
            if (!v.is_number()) throw ConfigInvalid(std::string(key) + " entries must be numbers");
        }
        out.push_back(v.get<T>());
    }
    return out;
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigInvalid(std::string("unknown key '") + it.key() + "' in " + where);
    }
}

} // namespace detail

// Relative table paths resolve against base_dir.
[[nodiscard]] inline ExperimentConfig parse_config(const std::string& text,
                                                   const std::filesystem::path& base_dir = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
    detail::reject_unknown(j,
                           {"command", "nu_list", "n_list", "x_list", "function", "series", "quadrature",
                            "output_path", "output_format"},
                           "config");
    ExperimentConfig c;
    try {
        if (j.contains("command")) c.command = command_from_string(j.at("command").get<std::string>());
        if (j.contains("nu_list")) c.nu_list = detail::read_list<double>(j.at("nu_list"), "nu_list");
        if (j.contains("n_list")) c.n_list = detail::read_list<int>(j.at("n_list"), "n_list");
        if (j.contains("x_list")) c.x_list = detail::read_list<double>(j.at("x_list"), "x_list");
        if (j.contains("function")) {
            const auto& f = j.at("function");
            if (f.is_string()) {
                c.function_name = f.get<std::string>();
                (void)functions::builtin(c.function_name);
            } else if (f.is_object() && f.contains("table") && f.size() == 1) {
                std::filesystem::path p = f.at("table").get<std::string>();
                c.function_table = p.is_relative() ? base_dir / p : p;
            } else {
                throw ConfigInvalid("function must be a built-in name or {\"table\": path}");
            }
        }
        if (j.contains("series")) {
            const auto& s = j.at("series");
            detail::reject_unknown(s, {"rel_tol", "max_terms", "tail_mode"}, "series");
            if (s.contains("rel_tol")) c.series.rel_tol = s.at("rel_tol").get<double>();
            if (s.contains("max_terms")) c.series.max_terms = s.at("max_terms").get<std::size_t>();
            if (s.contains("tail_mode")) c.series.tail_mode = tail_mode_from_string(s.at("tail_mode").get<std::string>());
        }
        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            detail::reject_unknown(q, {"abs_tol", "rel_tol", "max_subdivisions"}, "quadrature");
            if (q.contains("abs_tol")) c.quad.abs_tol = q.at("abs_tol").get<double>();
            if (q.contains("rel_tol")) c.quad.rel_tol = q.at("rel_tol").get<double>();
            if (q.contains("max_subdivisions")) c.quad.max_subdivisions = q.at("max_subdivisions").get<std::size_t>();
        }
        if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
        if (j.contains("output_format")) c.output_format = format_from_string(j.at("output_format").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config field has the wrong type: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigInvalid(e.what());
    }
    c.validate();
    return c;
}

[[nodiscard]] inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigInvalid("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// schemas

namespace schema {

inline std::vector<Column> fingerprint() {
    return {{"series_rel_tol", ColumnType::real},       {"series_max_terms", ColumnType::integer},
            {"series_tail_mode", ColumnType::text},     {"quad_abs_tol", ColumnType::real},
            {"quad_rel_tol", ColumnType::real},         {"quad_max_subdivisions", ColumnType::integer}};
}

inline std::vector<Column> with_fingerprint(std::vector<Column> cols) {
    for (auto& c : fingerprint()) cols.push_back(c);
    return cols;
}

inline std::vector<Column> eval() {
    return with_fingerprint({{"command", ColumnType::text},
                             {"function", ColumnType::text},
                             {"nu", ColumnType::real},
                             {"n", ColumnType::integer},
                             {"x", ColumnType::real},
                             {"value", ColumnType::real},
                             {"status", ColumnType::text}});
}

inline std::vector<Column> moments() {
    return with_fingerprint({{"command", ColumnType::text},     {"nu", ColumnType::real},
                             {"n", ColumnType::integer},        {"x", ColumnType::real},
                             {"raw0", ColumnType::real},        {"raw1", ColumnType::real},
                             {"raw2", ColumnType::real},        {"raw3", ColumnType::real},
                             {"raw4", ColumnType::real},        {"psi1", ColumnType::real},
                             {"psi2", ColumnType::real},        {"psi3", ColumnType::real},
                             {"psi2_direct", ColumnType::real}, {"psi3_direct", ColumnType::real},
                             {"compensated_fallback", ColumnType::boolean},
                             {"status", ColumnType::text}});
}

inline std::vector<Column> bounds() {
    return with_fingerprint({{"command", ColumnType::text},
                             {"inequality", ColumnType::text},
                             {"nu", ColumnType::real},
                             {"n", ColumnType::integer},
                             {"x", ColumnType::real},
                             {"lhs", ColumnType::real},
                             {"rhs", ColumnType::real},
                             {"margin", ColumnType::real},
                             {"status", ColumnType::text}});
}

inline std::vector<Column> rates() {
    return with_fingerprint({{"command", ColumnType::text},
                             {"theorem", ColumnType::text},
                             {"function", ColumnType::text},
                             {"nu", ColumnType::real},
                             {"n_min", ColumnType::integer},
                             {"n_max", ColumnType::integer},
                             {"n_count", ColumnType::integer},
                             {"worst_lhs", ColumnType::real},
                             {"worst_rhs", ColumnType::real},
                             {"fitted_constant", ColumnType::real},
                             {"empirical_order", ColumnType::real},
                             {"violations", ColumnType::integer},
                             {"diagnostic_violations", ColumnType::integer},
                             {"skipped", ColumnType::integer},
                             {"status", ColumnType::text}});
}

inline std::vector<Column> acceptance() {
    return with_fingerprint({{"command", ColumnType::text},
                             {"criterion", ColumnType::integer},
                             {"name", ColumnType::text},
                             {"measured", ColumnType::real},
                             {"threshold", ColumnType::real},
                             {"checks", ColumnType::integer},
                             {"failures", ColumnType::integer},
                             {"status", ColumnType::text},
                             {"detail", ColumnType::text}});
}

inline std::vector<Column> for_command(Command c) {
    switch (c) {
    case Command::eval: return eval();
    case Command::moments: return moments();
    case Command::bounds: return bounds();
    case Command::rates: return rates();
    case Command::all: return acceptance();
    }
    return {};
}

} // namespace schema

inline void append_fingerprint(std::vector<Value>& row, const SeriesPolicy& s, const QuadraturePolicy& q) {
    row.emplace_back(s.rel_tol);
    row.emplace_back(static_cast<std::int64_t>(s.max_terms));
    row.emplace_back(std::string(to_string(s.tail_mode)));
    row.emplace_back(q.abs_tol);
    row.emplace_back(q.rel_tol);
    row.emplace_back(static_cast<std::int64_t>(q.max_subdivisions));
}

// ---------------------------------------------------------------------------
// run

struct RunResult {
    ResultTable table;
    int exit_code = 0;
    std::string message;
};

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

// Names the grid point in a NumericalError escaping a sweep.
class GridPointFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

namespace detail {

inline constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

template <typename F>
auto at_point(const char* cmd, double nu, int n, double x, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const NumericalError& e) {
        std::ostringstream os;
        os.precision(17);
        os << cmd << " failed at nu=" << nu << " n=" << n << " x=" << x << ": " << e.what();
        throw GridPointFailure(os.str());
    }
}

inline ResultTable run_eval(const ExperimentConfig& c) {
    ResultTable t{schema::eval(), {}};
    const auto g = c.function();
    IntegralCache cache;
    for (double nu : c.nu_list)
        for (int n : c.n_list)
            for (double x : c.x_list) {
                double v = nan_v;
                std::string status = "ok";
                try {
                    v = at_point("eval", nu, n, x, [&] {
                        return apply_operator(OperatorQuery::make(n, x, nu, c.series, c.quad), g, &cache);
                    });
                } catch (const DomainError& e) {
                    status = "skipped_domain";
                }
                std::vector<Value> row{std::string("eval"), g.label, nu, static_cast<std::int64_t>(n), x, v, status};
                append_fingerprint(row, c.series, c.quad);
                t.add(std::move(row));
            }
    return t;
}

inline ResultTable run_moments(const ExperimentConfig& c) {
    ResultTable t{schema::moments(), {}};
    IntegralCache cache;
    for (double nu : c.nu_list)
        for (int n : c.n_list)
            for (double x : c.x_list) {
                const auto q = OperatorQuery::make(n, x, nu, c.series, c.quad);
                std::vector<Value> row{std::string("moments"), nu, static_cast<std::int64_t>(n), x};
                try {
                    const auto m = at_point("moments", nu, n, x, [&] { return central_moments(q, true, &cache); });
                    for (auto r : m.raw) row.emplace_back(static_cast<double>(r));
                    row.emplace_back(m.psi1);
                    row.emplace_back(m.psi2);
                    row.emplace_back(m.psi3_fourth);
                    row.emplace_back(m.psi2_direct.value_or(nan_v));
                    row.emplace_back(m.psi3_direct.value_or(nan_v));
                    row.emplace_back(m.compensated_fallback);
                    row.emplace_back(std::string("ok"));
                } catch (const DomainError&) {
                    // Whatever the order allows; the rest stays NaN.
                    std::array<double, 5> raw;
                    raw.fill(nan_v);
                    double p1 = nan_v, p2 = nan_v;
                    if (n >= 2) {
                        const int top = std::min(4, n - 2);
                        const auto r = at_point("moments", nu, n, x, [&] { return raw_moments(q, top); });
                        for (int k = 0; k <= top; ++k) raw[k] = static_cast<double>(r[k]);
                    }
                    if (n >= 3) p1 = at_point("moments", nu, n, x, [&] { return psi1(q); });
                    if (n >= 4) p2 = at_point("moments", nu, n, x, [&] { return psi2(q); });
                    for (double r : raw) row.emplace_back(r);
                    row.emplace_back(p1);
                    row.emplace_back(p2);
                    row.emplace_back(nan_v);
                    row.emplace_back(nan_v);
                    row.emplace_back(nan_v);
                    row.emplace_back(false);
                    row.emplace_back(std::string("skipped_domain"));
                }
                append_fingerprint(row, c.series, c.quad);
                t.add(std::move(row));
            }
    return t;
}

inline ResultTable run_bounds(const ExperimentConfig& c, bool& failed) {
    ResultTable t{schema::bounds(), {}};
    IntegralCache cache;
    for (double nu : c.nu_list)
        for (int n : c.n_list)
            for (double x : c.x_list) {
                std::vector<BoundReport> reps;
                if (n >= 2) {
                    const auto q = OperatorQuery::make(n, x, nu, c.series, c.quad);
                    reps = at_point("bounds", nu, n, x, [&] { return check_lemma2(q, &cache); });
                    const auto l3 = at_point("bounds", nu, n, x, [&] { return check_lemma3(q, &cache, false); });
                    reps.insert(reps.end(), l3.begin(), l3.end());
                } else {
                    const auto q = OperatorQuery{n, x, DunklParams::operator_domain(nu), c.series, c.quad};
                    for (auto id : {InequalityId::L2_E10, InequalityId::L2_E101, InequalityId::L2_E11,
                                    InequalityId::L2_E102, InequalityId::L2_E103, InequalityId::L3_psi1,
                                    InequalityId::L3_psi1_abs, InequalityId::L3_psi2_A, InequalityId::L3_psi3_B})
                        reps.push_back(skipped_report(id, q));
                }
                for (const auto& b : reps) {
                    if (b.status == CheckStatus::fail) failed = true;
                    std::vector<Value> row{std::string("bounds"), std::string(to_string(b.id)), nu,
                                           static_cast<std::int64_t>(n), x, b.lhs, b.rhs, b.margin,
                                           std::string(to_string(b.status))};
                    append_fingerprint(row, c.series, c.quad);
                    t.add(std::move(row));
                }
            }
    return t;
}

inline void add_rate_row(ResultTable& t, const RateReport& r, const ExperimentConfig& c, bool& failed) {
    const bool evaluated = !r.n_grid.empty() || !r.points.empty();
    std::string status = "skipped_domain";
    if (evaluated) {
        // For T9/T10 pass means the fitted constant is finite.
        status = r.pass ? "pass" : "fail";
        if (!r.pass) failed = true;
    }
    double worst_lhs = nan_v, worst_rhs = nan_v;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.lhs.size(); ++i) {
        const double m = std::isnan(r.rhs[i]) ? -r.lhs[i] : r.rhs[i] - r.lhs[i];
        if (m < worst_margin) {
            worst_margin = m;
            worst_lhs = r.lhs[i];
            worst_rhs = r.rhs[i];
        }
    }
    const auto [lo, hi] = r.n_grid.empty() ? std::pair<int, int>{0, 0}
                                           : std::pair<int, int>{*std::min_element(r.n_grid.begin(), r.n_grid.end()),
                                                                 *std::max_element(r.n_grid.begin(), r.n_grid.end())};
    std::vector<Value> row{std::string("rates"),
                           std::string(to_string(r.theorem_id)),
                           r.function,
                           r.nu,
                           static_cast<std::int64_t>(lo),
                           static_cast<std::int64_t>(hi),
                           static_cast<std::int64_t>(r.n_grid.size()),
                           worst_lhs,
                           worst_rhs,
                           r.fitted_constant.value_or(nan_v),
                           r.empirical_order,
                           static_cast<std::int64_t>(r.violations),
                           static_cast<std::int64_t>(r.diagnostic_violations),
                           static_cast<std::int64_t>(r.skipped),
                           status};
    append_fingerprint(row, c.series, c.quad);
    t.add(std::move(row));
}

// Each check whose hypotheses the configured function meets, per nu.
inline ResultTable run_rates(const ExperimentConfig& c, bool& failed) {
    ResultTable t{schema::rates(), {}};
    const auto g = c.function();
    RateOptions ro;
    ro.series = c.series;
    ro.quad = c.quad;
    IntegralCache cache;
    for (double nu : c.nu_list) {
        auto guarded = [&](auto&& f) {
            return at_point("rates", nu, c.n_list.front(), c.x_list.front(), std::forward<decltype(f)>(f));
        };
        if (g.in_weighted_class())
            add_rate_row(t, guarded([&] { return check_weighted_convergence(g, c.n_list, nu, ro, &cache); }), c,
                         failed);
        if (g.lipschitz)
            add_rate_row(t, guarded([&] { return check_lipschitz_rate(g, c.n_list, c.x_list, nu, ro, &cache); }), c,
                         failed);
        if (g.uniformly_continuous && g.growth_degree <= 2)
            add_rate_row(t, guarded([&] { return check_modulus_rate(g, c.n_list, c.x_list, nu, ro, &cache); }), c,
                         failed);
        if (g.bounded) {
            const auto k = guarded([&] { return check_k_functional_rate(g, c.n_list, c.x_list, nu, ro, &cache); });
            if (g.in_cb2()) add_rate_row(t, k.lemma8, c, failed);
            add_rate_row(t, k.theorem9, c, failed);
        }
        if (g.in_weighted_class())
            add_rate_row(t, guarded([&] { return check_weighted_modulus_rate(g, c.n_list, nu, ro, &cache); }), c,
                         failed);
    }
    return t;
}

inline int theorem_rank(const std::string& s) {
    static const std::vector<std::string> order{"T4", "T5", "T6", "T7", "L8", "T9", "T10"};
    return static_cast<int>(std::find(order.begin(), order.end(), s) - order.begin());
}

inline double real_or(const std::vector<Value>& row, const ResultTable& t, const char* name, double fallback) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i].name == name) return std::get<double>(row[i]);
    return fallback;
}

inline std::int64_t int_or(const std::vector<Value>& row, const ResultTable& t, const char* name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i].name == name) return std::get<std::int64_t>(row[i]);
    return 0;
}

} // namespace detail

// Stable sort by (nu, n, x); rows of equal key keep their generation order.
inline void sort_rows(ResultTable& t) {
    const bool has_n = std::any_of(t.columns.begin(), t.columns.end(), [](const Column& c) { return c.name == "n"; });
    std::vector<std::size_t> idx(t.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto key = [&](std::size_t i) {
        const auto& r = t.rows[i];
        const double nu = detail::real_or(r, t, "nu", 0.0);
        const std::int64_t n = has_n ? detail::int_or(r, t, "n") : 0;
        const double x = detail::real_or(r, t, "x", 0.0);
        return std::tuple<double, std::int64_t, double>{nu, n, x};
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<std::vector<Value>> rows;
    rows.reserve(idx.size());
    for (auto i : idx) rows.push_back(std::move(t.rows[i]));
    t.rows = std::move(rows);
}

[[nodiscard]] inline std::string serialize(const ResultTable& t, OutputFormat f) {
    return f == OutputFormat::csv ? to_csv(t) : to_json(t);
}

[[nodiscard]] inline ResultTable deserialize(const std::string& text, OutputFormat f, Command c) {
    const auto cols = schema::for_command(c);
    return f == OutputFormat::csv ? parse_csv(text, cols) : parse_json(text, cols);
}

// Sweeps for eval, moments, bounds and rates. The acceptance suite (all)
// lives in acceptance.hpp.
[[nodiscard]] inline RunResult run_sweep(const ExperimentConfig& c) {
    RunResult out;
    bool failed = false;
    try {
        switch (c.command) {
        case Command::eval: out.table = detail::run_eval(c); break;
        case Command::moments: out.table = detail::run_moments(c); break;
        case Command::bounds: out.table = detail::run_bounds(c, failed); break;
        case Command::rates: out.table = detail::run_rates(c, failed); break;
        case Command::all: throw ConfigInvalid("run_sweep does not handle 'all'");
        }
    } catch (const ConfigInvalid& e) {
        out.exit_code = exit_config;
        out.message = e.what();
        return out;
    } catch (const DomainError& e) {
        out.exit_code = exit_config;
        out.message = e.what();
        return out;
    } catch (const NumericalError& e) {
        out.exit_code = exit_numerical;
        out.message = e.what();
        return out;
    }
    sort_rows(out.table);
    out.exit_code = failed ? exit_fail : exit_pass;
    return out;
}

} // namespace szb
