#include "levy/cli.hpp"

#include "levy/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace levy {
namespace {

std::ofstream open_output(const std::string& path, const char* key, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream f(path, std::ios::out | mode);
    if (!f) throw ConfigError(std::string(key) + ": cannot write '" + path + "'");
    return f;
}

bool gate(const ConditionReport& report, const RunConfig& cfg, const CliOptions& opts, std::ostream& err) {
    if (!cfg.flags.require_conditions) return true;
    if (report.theorem_applies(cfg.flags.assume_c1 || opts.override_c1)) return true;
    err << "conditions not met: c1 " << to_string(report.c1.verdict) << ", c2 " << to_string(report.c2.verdict)
        << ", c3 " << to_string(report.c3.overall) << " (" << report.c3.reason << ")\n";
    return false;
}

std::string chunk_dump_path(const std::string& base, double s, Method m) {
    std::filesystem::path p(base);
    std::ostringstream name;
    name << p.stem().string() << "_s" << s << "_" << to_string(m) << p.extension().string();
    return (p.parent_path() / name.str()).string();
}

int analyze(const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const auto report = check_conditions(cfg.model, cfg.target, cfg.tolerances);
    const auto doc = to_json(report).dump(2);
    auto f = open_output(cfg.output.report_path, "output.report_path");
    f << doc << '\n';
    out << doc << '\n';
    return gate(report, cfg, opts, err) ? 0 : 2;
}

int estimate(const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
    if (cfg.s_grid.empty()) throw ConfigError("s_grid: required for estimate");
    const auto report = check_conditions(cfg.model, cfg.target, cfg.tolerances);
    if (!gate(report, cfg, opts, err)) return 2;

    const bool fresh = !std::filesystem::exists(cfg.output.csv_path) ||
                       std::filesystem::file_size(cfg.output.csv_path) == 0;
    auto csv = open_output(cfg.output.csv_path, "output.csv_path", std::ios::app);
    if (fresh) csv << kEstimateCsvHeader << '\n';

    RunOptions run_opts;
    run_opts.workers = opts.workers;
    run_opts.tol = cfg.tolerances;
    for (double s : cfg.s_grid) {
        for (Method m : cfg.methods) {
            std::vector<ChunkStats> chunks;
            if (!cfg.output.chunk_csv_path.empty()) run_opts.chunk_log = &chunks;
            const auto est = m == Method::crude ? simulate_hitting_crude(cfg.model, cfg.target, s, cfg.sim, run_opts)
                                                : simulate_hitting_is(cfg.model, cfg.target, s, cfg.sim, run_opts);
            const auto row = csv_row(est);
            csv << row << '\n';
            csv.flush();
            out << row << '\n';
            if (!cfg.output.chunk_csv_path.empty()) {
                const auto path = chunk_dump_path(cfg.output.chunk_csv_path, s, m);
                auto dump = open_output(path, "output.chunk_csv_path");
                write_chunk_csv(dump, chunks);
            }
        }
    }
    return 0;
}

int fit(const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const auto report = check_conditions(cfg.model, cfg.target, cfg.tolerances);
    if (!gate(report, cfg, opts, err)) return 2;
    if (report.c3.overall != Verdict::holds || !report.d_of_g)
        throw ConditionError("fit needs D(G), which requires c3 to hold: " + report.c3.reason);

    std::ifstream in(cfg.output.csv_path);
    if (!in) throw ConfigError("output.csv_path: cannot read '" + cfg.output.csv_path + "'");
    const auto rows = read_estimates_csv(in);

    const bool want_is = std::find(cfg.methods.begin(), cfg.methods.end(), Method::importance) != cfg.methods.end();
    auto pick = [&](Method m) {
        // Last row per s wins, so appended reruns replace earlier estimates.
        std::map<double, HitEstimate> by_s;
        for (const auto& r : rows) {
            if (r.method != m) continue;
            if (!cfg.s_grid.empty() && std::find(cfg.s_grid.begin(), cfg.s_grid.end(), r.s) == cfg.s_grid.end())
                continue;
            by_s[r.s] = r;
        }
        std::vector<HitEstimate> v;
        for (auto& [s, r] : by_s) v.push_back(r);
        return v;
    };
    auto records = pick(want_is ? Method::importance : Method::crude);
    if (records.empty() && want_is) records = pick(Method::crude);

    const auto result = fit_a0(records, *report.d_of_g, cfg.model.dim());
    const auto doc = to_json(result).dump(2);
    auto f = open_output(cfg.output.fit_path, "output.fit_path");
    f << doc << '\n';
    out << doc << '\n';
    return 0;
}

}  // namespace

int run(Command cmd, const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        switch (cmd) {
            case Command::analyze: return analyze(cfg, opts, out, err);
            case Command::estimate: return estimate(cfg, opts, out, err);
            case Command::fit: return fit(cfg, opts, out, err);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Large-deviation analysis and Monte Carlo checks for Levy processes hitting a remote orthant"};
    app.require_subcommand(1);

    std::string config_path;
    int workers = 0;
    bool override_c1 = false;
    std::map<CLI::App*, Command> commands;
    auto add = [&](const char* name, const char* help, Command cmd) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
        sub->add_option("--workers", workers, "Worker threads (default: $LEVY_ORTHANT_WORKERS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--override-c1", override_c1, "Treat an undecided c1 verdict as holding");
        commands[sub] = cmd;
    };
    add("analyze", "Check conditions and compute r_G, D(G), N(r_G)", Command::analyze);
    add("estimate", "Monte Carlo estimates of the hitting probability over s_grid", Command::estimate);
    add("fit", "Fit the constant A0 to the estimates CSV", Command::fit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    CliOptions opts;
    opts.override_c1 = override_c1;
    if (workers > 0) {
        opts.workers = workers;
    } else if (const char* env = std::getenv("LEVY_ORTHANT_WORKERS")) {
        try {
            opts.workers = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            err << "config error: LEVY_ORTHANT_WORKERS must be a positive integer\n";
            return 1;
        }
    } else {
        opts.workers = std::max(1u, std::thread::hardware_concurrency());
    }

    Command cmd = Command::analyze;
    for (const auto& [sub, c] : commands)
        if (sub->parsed()) cmd = c;

    try {
        const auto cfg = load_config(config_path);
        return run(cmd, cfg, opts, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace levy
