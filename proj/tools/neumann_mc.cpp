// neumann-mc: experiment front end.
//
//   neumann-mc run <config> [--seed S] [--workers W] [--out DIR]
//   neumann-mc table <1..8>  [--seed S] [--workers W] [--out DIR] [--table-path F]
//   neumann-mc precompute-wos --out FILE [--pairs P] [--paths Q]
//                             [--path-len L] [--delta-pre D] [--seed S] [--workers W]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>

#include "neumann_mc/circle_table.hpp"
#include "neumann_mc/experiments.hpp"

namespace {

int run_and_report(nmc::ExperimentConfig cfg, const std::string& out_dir, unsigned workers) {
    const auto result = nmc::run_experiment(std::move(cfg), out_dir, workers);
    for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo solvers for Neumann and mixed boundary problems "
                 "on the square"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", table_path, table_out;
    std::int64_t seed = -1;
    unsigned workers = 0;
    int table_id = 0;
    std::size_t pairs = 1000000, paths = 100000, path_len = 100;
    double delta_pre = 1e-4;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "key = value configuration file")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--workers", workers, "worker threads (default: all cores)");
    run->add_option("--out", out_dir, "output directory");

    auto* table = app.add_subcommand("table", "run a built-in table configuration");
    table->add_option("n", table_id, "table number (1..8)")->required();
    table->add_option("--seed", seed, "override the default seed");
    table->add_option("--workers", workers, "worker threads (default: all cores)");
    table->add_option("--out", out_dir, "output directory");
    table->add_option("--table-path", table_path, "circle-table cache file");

    auto* pre = app.add_subcommand("precompute-wos", "build the circle table");
    pre->add_option("--out", table_out, "output file")->required();
    pre->add_option("--pairs", pairs, "number of (exit time, position) pairs");
    pre->add_option("--paths", paths, "number of stored trajectories");
    pre->add_option("--path-len", path_len, "stored positions per trajectory");
    pre->add_option("--delta-pre", delta_pre, "fine Euler step of the precomputation");
    pre->add_option("--seed", seed, "seed");
    pre->add_option("--workers", workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw nmc::ConfigError("cannot open config: " + config_path);
            nmc::ExperimentConfig cfg = nmc::parse_config(in);
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            return run_and_report(std::move(cfg), out_dir, workers);
        }
        if (table->parsed()) {
            nmc::ExperimentConfig cfg = nmc::table_config(table_id);
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!table_path.empty()) cfg.table_path = table_path;
            return run_and_report(std::move(cfg), out_dir, workers);
        }
        // precompute-wos
        const nmc::CircleTable t = nmc::precompute_circle_table(
            delta_pre, pairs, paths, seed >= 0 ? static_cast<std::uint64_t>(seed) : 42,
            path_len, workers);
        nmc::save_circle_table(t, table_out);
        std::cout << "wrote " << table_out << " (" << t.n_pairs() << " pairs, "
                  << t.q_paths() << " paths)\n";
        return 0;
    } catch (const nmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
