#pragma once

// Per-criterion results and the experiment report serialized to report.json.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace walklab::report {

enum class Kind {
    identity,     // exact path identity, zero tolerance
    statistical,  // estimate against a reference or a test decision
};

struct CriterionResult {
    std::string criterion;  // acceptance id such as "AC-7", or a diagnostic id
    std::string name;
    Kind kind = Kind::statistical;
    double estimate = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    /// Tolerance, stderr multiple or significance level, as described by `rule`.
    double threshold = 0.0;
    /// Test statistic on which the decision was taken (|estimate - reference|, KS p, ...).
    double statistic = 0.0;
    std::string rule;
    bool passed = false;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::ordered_json config;
    std::vector<CriterionResult> results;
    std::vector<std::pair<std::string, double>> timings;  // phase, seconds
    std::vector<std::string> outputs;                     // files written, relative to the output dir

    bool passed() const noexcept;
    bool identity_failed() const noexcept;
    /// Acceptance ids in order of first appearance, each with the conjunction of its results.
    std::vector<std::pair<std::string, bool>> criteria() const;
    void add(CriterionResult r) { results.push_back(std::move(r)); }
};

/// Acceptance ids look like "AC-<number>"; everything else is a diagnostic.
bool is_acceptance_id(const std::string& id);

nlohmann::ordered_json to_json(const CriterionResult& r);
/// Timings are wall-clock and vary between runs; pass false for a stable document.
nlohmann::ordered_json to_json(const ExperimentReport& report, bool with_timings = true);

/// Pass/fail when |estimate - reference| < tolerance.
CriterionResult within(std::string criterion, std::string name, double estimate, double std_error,
                       double reference, double tolerance, std::size_t n_samples, std::uint64_t seed);

}  // namespace walklab::report
