// Experiment runner for the mesh-free variational RBF solver.
//
//   rbfvar run --config experiments/poisson1d.json [--out results.csv]
//   rbfvar validate --config experiments/poisson1d.json

#include "rbfvar/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

using namespace rbfvar;

namespace {

int cmd_validate(const std::string& config_path) {
    const experiment::ExperimentConfig cfg = experiment::parse_config_file(config_path);
    const auto grid = experiment::resolve_grid(cfg);
    std::cout << "resolved config:\n" << experiment::to_json(cfg).dump(2) << "\n";
    std::cout << "grid (" << grid.size() << (grid.size() == 1 ? " run" : " runs") << "):\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = grid[i];
        std::cout << "  [" << i << "] N=" << p.N << " T=" << p.T << " tau=" << p.tau
                  << " beta=" << p.beta << "\n";
    }
    return 0;
}

int cmd_run(const std::string& config_path, std::string out_path, bool deterministic, bool quiet) {
    const experiment::ExperimentConfig cfg = experiment::parse_config_file(config_path);
    if (out_path.empty()) out_path = cfg.out.empty() ? "results.csv" : cfg.out;

    const unsigned threads = deterministic ? 1u : 0u;
    const auto records = experiment::run_sweep(cfg, threads);

    bool any_failed = false;
    for (const auto& r : records) {
        if (r.failed) {
            any_failed = true;
            std::cerr << "run failed: benchmark=" << r.benchmark << " N=" << r.N << " T=" << r.T
                      << " tau=" << r.tau << " beta=" << r.beta << ": " << r.fail_reason << "\n";
        } else if (!quiet) {
            std::cout << "N=" << r.N << " T=" << r.T << " tau=" << r.tau << " beta=" << r.beta
                      << " -> E=" << (r.error_rel_l2 ? std::to_string(*r.error_rel_l2) : "n/a")
                      << " rank=" << (r.rank_kept ? std::to_string(*r.rank_kept) : "n/a")
                      << " iters=" << (r.iterations ? std::to_string(*r.iterations) : "n/a")
                      << (r.converged && !*r.converged ? " (not converged)" : "") << "\n";
        }
    }
    experiment::write_csv(records, out_path);
    if (!quiet) std::cout << "wrote " << records.size() << " record(s) to " << out_path << "\n";
    return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesh-free variational RBF solver: benchmark and sweep runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool deterministic = false;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "execute a config (sweeps implied by list-valued fields)");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_path, "output CSV path (overrides the config's 'out')");
    run->add_flag("--deterministic", deterministic, "run sweep points sequentially");
    run->add_flag("--quiet", quiet, "suppress per-run progress output");

    auto* validate = app.add_subcommand("validate", "parse a config and echo the resolved grid");
    validate->add_option("--config", config_path, "JSON experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmd_validate(config_path);
        return cmd_run(config_path, out_path, deterministic, quiet);
    } catch (const experiment::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
