// szb: experiment runner for the Szasz-Beta-Dunkl operators.
//
//   szb <eval|moments|bounds|rates|all> --config <file> [--out <path>] [--format csv|json]
//
// Exit codes: 0 pass, 1 suite failure, 2 config error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "szb/acceptance.hpp"
#include "szb/experiment.hpp"

namespace {

std::string column_help() {
    std::string out = "CSV/JSON columns (doubles printed with 17 significant digits; nan/inf spelled out):\n";
    for (auto c : {szb::Command::eval, szb::Command::moments, szb::Command::bounds, szb::Command::rates,
                   szb::Command::all}) {
        out += "  ";
        out += szb::to_string(c);
        out += ":";
        for (const auto& col : szb::schema::for_command(c)) out += " " + col.name;
        out += "\n";
    }
    out += "Exit codes: 0 pass, 1 suite failure, 2 config error, 3 numerical failure.\n";
    out += "Config (JSON, all fields optional): nu_list, n_list, x_list, function (built-in name or\n"
           "{\"table\": path}), series {rel_tol, max_terms, tail_mode}, quadrature {abs_tol, rel_tol,\n"
           "max_subdivisions}, output_path, output_format. 'all' ignores the grids and runs the\n"
           "pinned acceptance suite.\n";
    return out;
}

bool write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

int run(szb::Command cmd, const std::string& config_path, const std::string& out_path,
        const std::string& format) {
    szb::ExperimentConfig cfg;
    try {
        cfg = szb::load_config(config_path);
        if (!out_path.empty()) cfg.output_path = out_path;
        if (!format.empty()) cfg.output_format = szb::format_from_string(format);
        cfg.command = cmd;
        if (cmd != szb::Command::all) (void)cfg.function();
    } catch (const szb::ConfigInvalid& e) {
        std::cerr << "szb: config error: " << e.what() << "\n";
        return szb::exit_config;
    }

    szb::ResultTable table;
    int code = szb::exit_pass;
    if (cmd == szb::Command::all) {
        szb::acceptance::Options o;
        o.series = cfg.series;
        o.quad = cfg.quad;
        o.log = &std::cerr;
        try {
            const auto rs = szb::acceptance::run_all(o);
            for (const auto& r : rs) {
                std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail << "\n";
                if (!r.pass) code = szb::exit_fail;
            }
            table = szb::acceptance::to_table(rs, o);
        } catch (const szb::NumericalError& e) {
            std::cerr << "szb: numerical failure: " << e.what() << "\n";
            return szb::exit_numerical;
        }
    } else {
        auto r = szb::run_sweep(cfg);
        if (r.exit_code == szb::exit_config || r.exit_code == szb::exit_numerical) {
            std::cerr << "szb: " << (r.exit_code == szb::exit_config ? "config error: " : "numerical failure: ")
                      << r.message << "\n";
            return r.exit_code;
        }
        table = std::move(r.table);
        code = r.exit_code;
    }
    if (!write_output(szb::serialize(table, cfg.output_format), cfg.output_path)) {
        std::cerr << "szb: cannot write '" << cfg.output_path << "'\n";
        return szb::exit_config;
    }
    std::cerr << "szb: " << szb::to_string(cmd) << ": " << table.rows.size() << " rows, "
              << (code == szb::exit_pass ? "pass" : "fail") << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Szasz-Beta-Dunkl operator experiments"};
    app.footer(column_help());
    app.require_subcommand(1);

    std::string config, out, format;
    std::optional<szb::Command> chosen;
    const std::pair<const char*, const char*> commands[] = {
        {"eval", "evaluate T_n(g; x) over the (nu, n, x) grid"},
        {"moments", "raw moments and central moments Psi_1, Psi_2, Psi_3"},
        {"bounds", "check the raw- and central-moment inequalities"},
        {"rates", "run the convergence-rate checks that apply to the function"},
        {"all", "run the acceptance suite"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "experiment config (JSON)")->required();
        sub->add_option("--out", out, "output file (default: config output_path, else stdout)");
        sub->add_option("--format", format, "csv or json (default: config output_format, else csv)")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&chosen, n = std::string(name)] { chosen = szb::command_from_string(n); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : szb::exit_config;
    }
    return run(*chosen, config, out, format);
}
