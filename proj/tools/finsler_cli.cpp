#include "finsler/config.hpp"
#include "finsler/errors.hpp"
#include "finsler/runner.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace finsler;

int main(int argc, char** argv)
{
    CLI::App app{"Finsler metric-measure workbench"};
    app.require_subcommand(1);

    std::string config;
    RunOptions opt;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config, "JSON run configuration");
        if (needs_config) {
            c->required()->check(CLI::ExistingFile);
        }
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out_dir, "output directory (overrides output.dir)");
    };
    auto* compute = app.add_subcommand("compute", "pointwise quantities at the configured (x, y) points");
    common(compute, true);
    auto* polar = app.add_subcommand("polar", "polar-field CSV per base point");
    common(polar, true);
    auto* verify = app.add_subcommand("verify", "run the configured checker suite");
    common(verify, true);
    verify->add_option("--tolerance-scale", opt.tolerance_scale, "multiplies every checker tolerance")
        ->check(CLI::PositiveNumber);
    verify->add_flag("--emit-plot-script", opt.emit_plot_script, "write a gnuplot script next to the CSVs");
    auto* catalog = app.add_subcommand("catalog", "list metric and measure families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    try {
        if (catalog->parsed()) {
            std::cout << catalog_json() << "\n";
            return exit_pass;
        }
        const RunConfig cfg = load_config(config);
        if (compute->parsed()) {
            if (cfg.points.empty()) {
                throw ConfigError("points: compute needs at least one (x, y) entry");
            }
            const std::string text = run_compute(cfg);
            if (!opt.out_dir.empty()) {
                std::filesystem::create_directories(opt.out_dir);
                std::ofstream(std::filesystem::path(opt.out_dir) / "compute.json", std::ios::binary) << text;
            }
            std::cout << text;
            return exit_pass;
        }
        if (polar->parsed()) {
            for (const auto& name : run_polar(cfg, opt)) {
                std::cout << name << "\n";
            }
            return exit_pass;
        }
        const VerifyOutcome out = run_verify(cfg, opt);
        for (const auto& e : out.reports) {
            std::cout << "bp" << e.base_index << " " << e.report.theorem << ": " << status_name(e.report.status);
            if (!e.report.rows.empty()) {
                std::cout << " (worst margin " << e.report.worst_margin() << ")";
            }
            if (!e.report.note.empty() && e.report.status != Status::pass) {
                std::cout << " - " << e.report.note;
            }
            std::cout << "\n";
        }
        std::cout << "exit " << out.exit_code << "\n";
        return out.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return exit_fail;
    }
}
