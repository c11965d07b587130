#pragma once

// The experiment catalog. Each experiment runs its simulations, evaluates
// its acceptance criteria and writes report.json, sample CSVs and SVG plots
// into the configured output directory.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "walklab/config.hpp"
#include "walklab/report.hpp"

namespace walklab::experiments {

struct Entry {
    std::string name;
    std::string summary;
    std::vector<std::string> criteria;  // acceptance ids evaluated by the experiment
    std::vector<std::string> default_p;
    std::vector<std::int64_t> default_n;
    std::size_t default_replicas = 0;
    /// Fewest replicas for which the experiment's estimators are defined.
    std::size_t min_replicas = 1;
};

std::span<const Entry> list_experiments();

/// nullptr when the name is not registered.
const Entry* find(const std::string& name);

/// Runs a validated configuration. CSV outputs are a function of the
/// configuration alone (thread count included). Throws IdentityViolation when
/// a coupled path breaks an exact identity and std::runtime_error when the
/// output directory cannot be written.
report::ExperimentReport run_experiment(const config::ExperimentConfig& config);

/// Writes report.json (with timings) into the output directory.
void write_report(const config::ExperimentConfig& config, const report::ExperimentReport& report);

nlohmann::ordered_json config_echo(const config::ExperimentConfig& config);

}  // namespace walklab::experiments
