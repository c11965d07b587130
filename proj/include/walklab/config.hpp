#pragma once

// Experiment configuration: a flat `key = value` file with '#' comments,
// overlaid on per-experiment defaults and then on command-line overrides.
//
// Keys: experiment, p, n, replicas, seed, dt, h, out, threads.
// p and n take comma-separated lists; p entries are decimals or ratios ("2/3").

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "walklab/rng.hpp"

namespace walklab::config {

struct Probability {
    std::string text;  // as written, echoed in reports
    rng::GeometricParam param;
};

/// Parses "2/3" through GeometricParam::from_ratio and "0.5" as a decimal.
/// Throws ConfigError.
Probability parse_probability(const std::string& text);

struct ExperimentConfig {
    std::string experiment;
    std::vector<Probability> p;
    std::vector<std::int64_t> n_grid;
    std::size_t replicas = 0;
    std::uint64_t seed = 1;
    double dt = 1e-4;
    double h = 0.02;
    std::filesystem::path out = "out";
    unsigned threads = 1;

    const rng::GeometricParam& param() const { return p.front().param; }
};

using Overrides = std::map<std::string, std::string>;

/// Reads key = value lines. Throws ConfigError on unreadable files, lines
/// without '=', empty keys and repeated keys.
Overrides read_file(const std::filesystem::path& path);
Overrides parse_text(const std::string& text);

/// Defaults of a registered experiment (its acceptance-scale settings).
ExperimentConfig defaults_for(const std::string& experiment);

/// Applies overrides on top of `base`. Unknown keys and malformed values throw ConfigError.
ExperimentConfig apply(ExperimentConfig base, const Overrides& overrides);

/// Experiment name in the registry; every list non-empty; every numeric field positive.
void validate(const ExperimentConfig& config);

/// `file` first, then `cli` (which wins), on top of the defaults of `experiment`.
/// An `experiment` key in the file must agree with `experiment` when both are given.
ExperimentConfig resolve(const std::string& experiment, const Overrides& file, const Overrides& cli);

}  // namespace walklab::config
