// Runs every experiment at its acceptance-scale defaults (seed 1), prints one
// PASS/FAIL line per acceptance criterion and exits nonzero on any failure.
//
//   acceptance [--out DIR]

#include <fmt/format.h>

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "walklab/config.hpp"
#include "walklab/experiments.hpp"
#include "walklab/parallel.hpp"

using namespace walklab;
namespace fs = std::filesystem;

namespace {

constexpr int kCriteria = 14;

struct Verdict {
    bool seen = false;
    bool passed = true;
    std::vector<std::string> notes;

    void add(bool ok, std::string note) {
        seen = true;
        passed = passed && ok;
        notes.push_back(std::move(note));
    }
};

std::string describe(const report::CriterionResult& r) {
    return fmt::format("{} [{}] est={:.6g} ref={:.6g} stat={:.4g} thr={:.4g}", r.name, r.passed ? "ok" : "FAIL",
                       r.estimate, r.reference, r.statistic, r.threshold);
}

std::map<std::string, std::string> csv_bytes(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        files[e.path().filename().string()] = s.str();
    }
    return files;
}

// Reduced configurations for the repeated-run check; every experiment appears once.
config::Overrides reduced(const std::string& name) {
    if (name == "vertical-donsker") return {{"n", "400"}, {"replicas", "300"}};
    if (name == "scenery-flt") return {{"n", "100,400,1600"}, {"replicas", "300"}};
    if (name == "joint-flt") return {{"n", "400"}, {"replicas", "200"}};
    if (name == "embedding-identities") return {{"n", "200"}, {"replicas", "5"}};
    if (name == "stopping-ratio") return {{"n", "5000"}, {"replicas", "3"}};
    if (name == "sup-localtime") return {{"n", "100,400,1600"}, {"replicas", "100"}};
    if (name == "dependence") return {{"replicas", "10000"}, {"dt", "0.01"}};
    if (name == "cn-quadrature") return {};
    if (name == "self-similarity") return {{"replicas", "300"}, {"dt", "0.001"}};
    if (name == "tightness-diagnostic") return {{"n", "100,316,1000"}, {"replicas", "100"}};
    return {{"replicas", "10"}};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path root = "acceptance_out";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            root = argv[++i];
        } else {
            fmt::print(stderr, "usage: acceptance [--out DIR]\n");
            return 2;
        }
    }

    std::map<int, Verdict> verdicts;
    const auto note = [&](const std::string& id, bool ok, std::string text) {
        verdicts[std::stoi(id.substr(3))].add(ok, std::move(text));
    };

    for (const auto& entry : experiments::list_experiments()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            auto c = config::defaults_for(entry.name);
            c.seed = 1;
            c.out = root / entry.name;
            const auto rep = experiments::run_experiment(c);
            experiments::write_report(c, rep);
            for (const auto& r : rep.results) {
                if (report::is_acceptance_id(r.criterion)) note(r.criterion, r.passed, entry.name + ": " + describe(r));
            }
        } catch (const std::exception& e) {
            for (const auto& id : entry.criteria) note(id, false, entry.name + ": exception: " + e.what());
        }
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        fmt::print("ran {} in {:.1f} s\n", entry.name, took.count());
        std::fflush(stdout);
    }

    // Determinism: each experiment twice with one configuration, then with a
    // different thread count; CSV bytes must match.
    for (const auto& entry : experiments::list_experiments()) {
        try {
            std::vector<std::map<std::string, std::string>> runs;
            for (unsigned threads : {1u, 1u, 3u}) {
                auto c = config::resolve(entry.name, reduced(entry.name), {});
                c.threads = threads;
                c.out = root / "determinism" / fmt::format("{}-{}", entry.name, runs.size());
                fs::remove_all(c.out);
                experiments::run_experiment(c);
                runs.push_back(csv_bytes(c.out));
            }
            const bool repeat = !runs[0].empty() && runs[0] == runs[1];
            const bool threads = runs[0] == runs[2];
            note("AC-14", repeat && threads,
                 fmt::format("{}: {} csv files, repeat {}, threads 1 vs 3 {}", entry.name, runs[0].size(),
                             repeat ? "identical" : "DIFFER", threads ? "identical" : "DIFFER"));
        } catch (const std::exception& e) {
            note("AC-14", false, entry.name + ": exception: " + e.what());
        }
    }

    fmt::print("\n");
    for (const auto& [k, v] : verdicts) {
        for (const auto& n : v.notes) fmt::print("  AC-{}  {}\n", k, n);
    }
    fmt::print("\n");
    int failed = 0;
    for (int k = 1; k <= kCriteria; ++k) {
        const auto it = verdicts.find(k);
        const bool ok = it != verdicts.end() && it->second.seen && it->second.passed;
        failed += !ok;
        fmt::print("{} AC-{} ({} checks)\n", ok ? "PASS" : "FAIL", k, it == verdicts.end() ? 0 : it->second.notes.size());
    }
    fmt::print("{} of {} criteria passed\n", kCriteria - failed, kCriteria);
    return failed == 0 ? 0 : 1;
}
