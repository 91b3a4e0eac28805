#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "entsim/config.hpp"
#include "entsim/csv.hpp"
#include "entsim/pipeline.hpp"

namespace {

void print_result(const entsim::ScenarioResult& res) {
    for (const entsim::CheckRow& c : res.checks) {
        if (c.kind == entsim::CheckKind::Report) {
            std::printf("  [  -   ] %-42s computed=%.10g\n", c.id.c_str(), c.computed);
            continue;
        }
        std::printf("  [ %s ] %-42s computed=%.10g expected=%.10g tol=%.3g (%s)\n",
                    c.pass ? "pass" : "FAIL", c.id.c_str(), c.computed, c.expected, c.tolerance,
                    entsim::check_kind_name(c.kind));
    }
    std::printf("%s: %s in %.2f s\n", res.name.c_str(), res.passed() ? "all checks passed" : "CHECKS FAILED",
                res.elapsed_seconds);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrated two-guide polarization-entangled pair source simulator"};
    app.require_subcommand(1);

    std::string scenario, config_path, out_dir, validate_path;
    std::uint64_t seed = 0;
    double mean_total = 0.0;
    bool serial = false;

    CLI::App* sim = app.add_subcommand("simulate", "run one scenario against the published targets");
    sim->add_option("scenario", scenario, "scenario name; see list-scenarios")->required();
    sim->add_option("--config", config_path, "JSON config file (default: the published device)");
    sim->add_option("--out", out_dir, "directory for CSV/JSON artifacts");
    CLI::Option* seed_opt = sim->add_option("--seed", seed, "override detection.seed");
    CLI::Option* mean_opt = sim->add_option("--mean-total", mean_total, "override detection.mean_total");
    sim->add_flag("--serial", serial, "run the grid kernels single-threaded");

    CLI::App* val = app.add_subcommand("validate", "check a config file, reporting every problem");
    val->add_option("--config", validate_path, "JSON config file")->required();

    CLI::App* ls = app.add_subcommand("list-scenarios", "print the available scenario names");
    CLI::App* def = app.add_subcommand("default-config", "print the published-device config as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ls->parsed()) {
            for (const std::string& name : entsim::scenario_names()) std::printf("%s\n", name.c_str());
            return 0;
        }
        if (def->parsed()) {
            std::fputs(entsim::config_to_text(entsim::default_config()).c_str(), stdout);
            return 0;
        }
        if (val->parsed()) {
            const entsim::ConfigResult r =
                entsim::validate_config(entsim::csv::read_text_file(validate_path));
            if (r.ok()) {
                std::printf("%s: ok\n", validate_path.c_str());
                return 0;
            }
            std::printf("%s: %zu problem(s)\n", validate_path.c_str(), r.errors.size());
            for (const entsim::ConfigError& e : r.errors)
                std::printf("  %s\n", e.format().c_str());
            return 1;
        }

        const entsim::SourceConfig cfg =
            config_path.empty() ? entsim::default_config() : entsim::load_config(config_path);
        entsim::RunOptions opts;
        opts.out_dir = out_dir;
        if (seed_opt->count()) opts.seed = seed;
        if (mean_opt->count()) opts.mean_total = mean_total;
        opts.exec = serial ? entsim::kernels::Exec::Serial : entsim::kernels::Exec::Parallel;

        const entsim::ScenarioResult res = entsim::run_scenario(scenario, cfg, opts);
        print_result(res);
        return res.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
