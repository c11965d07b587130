#include "walklab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "walklab/errors.hpp"
#include "walklab/experiments.hpp"
#include "walklab/parallel.hpp"

namespace walklab::config {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) items.push_back(trim(item));
    return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    }
    return value;
}

}  // namespace

Probability parse_probability(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return {text, rng::GeometricParam(parse_number<double>("p", text))};
        }
        const auto num = parse_number<std::int64_t>("p", trim(text.substr(0, slash)));
        const auto den = parse_number<std::int64_t>("p", trim(text.substr(slash + 1)));
        return {text, rng::GeometricParam::from_ratio(num, den)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config key 'p': " + std::string(e.what()));
    }
}

Overrides parse_text(const std::string& text) {
    Overrides out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        }
    }
    return out;
}

Overrides read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

ExperimentConfig defaults_for(const std::string& experiment) {
    const auto* entry = experiments::find(experiment);
    if (entry == nullptr) throw ConfigError("unknown experiment '" + experiment + "'");
    ExperimentConfig c;
    c.experiment = experiment;
    for (const auto& p : entry->default_p) c.p.push_back(parse_probability(p));
    c.n_grid = entry->default_n;
    c.replicas = entry->default_replicas;
    c.threads = default_thread_count();
    return c;
}

ExperimentConfig apply(ExperimentConfig c, const Overrides& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key == "experiment") {
            c.experiment = value;
        } else if (key == "p") {
            c.p.clear();
            for (const auto& item : split_list(value)) c.p.push_back(parse_probability(item));
        } else if (key == "n") {
            c.n_grid.clear();
            for (const auto& item : split_list(value)) c.n_grid.push_back(parse_number<std::int64_t>(key, item));
        } else if (key == "replicas") {
            c.replicas = parse_number<std::size_t>(key, value);
        } else if (key == "seed") {
            c.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "dt") {
            c.dt = parse_number<double>(key, value);
        } else if (key == "h") {
            c.h = parse_number<double>(key, value);
        } else if (key == "out") {
            if (value.empty()) throw ConfigError("config key 'out' is empty");
            c.out = value;
        } else if (key == "threads") {
            c.threads = parse_number<unsigned>(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    const auto* entry = experiments::find(c.experiment);
    if (entry == nullptr) throw ConfigError("unknown experiment '" + c.experiment + "'");
    if (c.p.empty()) throw ConfigError("p must list at least one probability");
    if (c.n_grid.empty()) throw ConfigError("n must list at least one horizon");
    if (std::any_of(c.n_grid.begin(), c.n_grid.end(), [](std::int64_t n) { return n <= 0; })) {
        throw ConfigError("every n must be positive");
    }
    if (!std::is_sorted(c.n_grid.begin(), c.n_grid.end()) ||
        std::adjacent_find(c.n_grid.begin(), c.n_grid.end()) != c.n_grid.end()) {
        throw ConfigError("n must be strictly increasing");
    }
    if (c.replicas == 0) throw ConfigError("replicas must be positive");
    if (c.replicas < entry->min_replicas) {
        throw ConfigError(c.experiment + " needs at least " + std::to_string(entry->min_replicas) + " replicas");
    }
    if (!(c.dt > 0.0) || c.dt > 1.0) throw ConfigError("dt must lie in (0, 1]");
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");
    if (c.threads == 0) throw ConfigError("threads must be positive");
    const double steps = 1.0 / c.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) throw ConfigError("1/dt must be an integer");
}

ExperimentConfig resolve(const std::string& experiment, const Overrides& file, const Overrides& cli) {
    if (const auto it = file.find("experiment"); it != file.end() && it->second != experiment) {
        throw ConfigError("config file is for experiment '" + it->second + "', not '" + experiment + "'");
    }
    auto c = apply(apply(defaults_for(experiment), file), cli);
    validate(c);
    return c;
}

}  // namespace walklab::config
