// walklab: run experiments, list the catalog, plot CSV files.
//
// Exit codes: 0 all criteria passed, 1 statistical failure,
// 2 usage or configuration error, 3 identity violation.

#include <CLI11.hpp>

#include <fmt/format.h>

#include <iostream>
#include <optional>

#include "walklab/config.hpp"
#include "walklab/errors.hpp"
#include "walklab/experiments.hpp"
#include "walklab/plot.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kStatFailure = 1;
constexpr int kUsage = 2;
constexpr int kIdentity = 3;

int list() {
    for (const auto& e : walklab::experiments::list_experiments()) {
        std::string ids;
        for (const auto& id : e.criteria) ids += (ids.empty() ? "" : ",") + id;
        fmt::print("{:<22} {:<16} {}\n", e.name, ids, e.summary);
    }
    return kPass;
}

int run(const std::string& experiment, const std::string& config_path, const walklab::config::Overrides& cli) {
    using namespace walklab;
    const auto file = config::read_file(config_path);
    const auto cfg = config::resolve(experiment, file, cli);
    const auto rep = experiments::run_experiment(cfg);
    experiments::write_report(cfg, rep);
    for (const auto& r : rep.results) {
        fmt::print("{:<5} {:<26} {}  estimate={:.6g} reference={:.6g} statistic={:.6g} threshold={:.6g}\n",
                   r.passed ? "PASS" : "FAIL", r.criterion, r.name, r.estimate, r.reference, r.statistic,
                   r.threshold);
    }
    fmt::print("{}: {} -> {}\n", experiment, rep.passed() ? "passed" : "failed", (cfg.out / "report.json").string());
    if (rep.identity_failed()) return kIdentity;
    return rep.passed() ? kPass : kStatFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"walklab: Monte Carlo experiments on randomly oriented lattices and random scenery"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    run_cmd->add_option("experiment", experiment, "experiment name (see `walklab list`)")->required();
    run_cmd->add_option("--config", config_path, "key = value configuration file")->required();
    run_cmd->add_option("--seed", seed, "master seed");
    run_cmd->add_option("--replicas", replicas, "number of replicas");
    run_cmd->add_option("--threads", threads, "worker threads");
    run_cmd->add_option("--out", out, "output directory");

    app.add_subcommand("list", "list the experiment catalog");

    auto* plot_cmd = app.add_subcommand("plot", "render a CSV file as SVG");
    std::string csv_path;
    std::string spec;
    plot_cmd->add_option("csv", csv_path, "numeric CSV with a header line")->required();
    plot_cmd->add_option("--spec", spec, "x=col;y=col[,col];scale=linear|loglog;kind=line|scatter;title=..;out=..")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (app.got_subcommand("list")) return list();
        if (app.got_subcommand("plot")) {
            const auto svg = walklab::plot::emit_plot(csv_path, spec);
            fmt::print("{}\n", svg.string());
            return kPass;
        }
        walklab::config::Overrides cli;
        if (seed) cli["seed"] = std::to_string(*seed);
        if (replicas) cli["replicas"] = std::to_string(*replicas);
        if (threads) cli["threads"] = std::to_string(*threads);
        if (out) cli["out"] = *out;
        return run(experiment, config_path, cli);
    } catch (const walklab::IdentityViolation& e) {
        std::cerr << "identity violation: " << e.what() << '\n';
        return kIdentity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
