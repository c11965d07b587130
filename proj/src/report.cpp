#include "walklab/report.hpp"

#include <algorithm>
#include <cmath>

namespace walklab::report {

bool ExperimentReport::passed() const noexcept {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

bool ExperimentReport::identity_failed() const noexcept {
    return std::any_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.kind == Kind::identity && !r.passed; });
}

std::vector<std::pair<std::string, bool>> ExperimentReport::criteria() const {
    std::vector<std::pair<std::string, bool>> out;
    for (const auto& r : results) {
        if (!is_acceptance_id(r.criterion)) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == r.criterion; });
        if (it == out.end()) {
            out.emplace_back(r.criterion, r.passed);
        } else {
            it->second = it->second && r.passed;
        }
    }
    return out;
}

bool is_acceptance_id(const std::string& id) {
    if (id.size() < 4 || id.compare(0, 3, "AC-") != 0) return false;
    return std::all_of(id.begin() + 3, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

namespace {

// JSON has no inf/nan; nlohmann would emit null silently, so make it explicit.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

nlohmann::ordered_json to_json(const CriterionResult& r) {
    nlohmann::ordered_json j;
    j["criterion"] = r.criterion;
    j["name"] = r.name;
    j["kind"] = r.kind == Kind::identity ? "identity" : "statistical";
    j["estimate"] = number(r.estimate);
    j["stderr"] = number(r.std_error);
    j["reference"] = number(r.reference);
    j["threshold"] = number(r.threshold);
    j["statistic"] = number(r.statistic);
    j["rule"] = r.rule;
    j["decision"] = r.passed ? "pass" : "fail";
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed;
    return j;
}

nlohmann::ordered_json to_json(const ExperimentReport& report, bool with_timings) {
    nlohmann::ordered_json j;
    j["experiment"] = report.experiment;
    j["config"] = report.config;
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : report.results) j["results"].push_back(to_json(r));
    j["criteria"] = nlohmann::ordered_json::array();
    for (const auto& [id, ok] : report.criteria()) {
        j["criteria"].push_back({{"criterion", id}, {"decision", ok ? "pass" : "fail"}});
    }
    j["passed"] = report.passed();
    j["outputs"] = report.outputs;
    if (with_timings) {
        nlohmann::ordered_json t;
        for (const auto& [phase, seconds] : report.timings) t[phase] = seconds;
        j["timings_s"] = t;
    }
    return j;
}

CriterionResult within(std::string criterion, std::string name, double estimate, double std_error,
                       double reference, double tolerance, std::size_t n_samples, std::uint64_t seed) {
    CriterionResult r;
    r.criterion = std::move(criterion);
    r.name = std::move(name);
    r.estimate = estimate;
    r.std_error = std_error;
    r.reference = reference;
    r.threshold = tolerance;
    r.statistic = std::abs(estimate - reference);
    r.rule = "|estimate - reference| < threshold";
    r.passed = r.statistic < tolerance;
    r.n_samples = n_samples;
    r.seed = seed;
    return r;
}

}  // namespace walklab::report
