#include "walklab/scaling_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "walklab/csv.hpp"
#include "walklab/errors.hpp"
#include "walklab/parallel.hpp"

namespace walklab::limit {

namespace {

// Number of dt steps in `span`, which must be an integer multiple of dt.
std::int64_t step_count_for(double span, double dt, const char* what) {
    const double ratio = span / dt;
    const auto steps = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument(std::string(what) + " must be an integer multiple of dt");
    }
    return steps;
}

}  // namespace

double BrownianPath::at_time(double t) const {
    const auto k = step_count_for(t, dt, "time");
    if (k < 0 || k > steps()) throw std::out_of_range("time outside the Brownian path");
    return values[static_cast<std::size_t>(k)];
}

BrownianPath simulate_brownian(double horizon, double dt, rng::RngStream& stream) {
    if (!(horizon > 0.0)) throw std::invalid_argument("Brownian horizon must be positive");
    if (!(dt > 0.0) || dt > horizon) throw std::invalid_argument("Brownian step must satisfy 0 < dt <= T");
    const auto steps = step_count_for(horizon, dt, "horizon");
    BrownianPath path;
    path.dt = dt;
    path.horizon = horizon;
    path.values.resize(static_cast<std::size_t>(steps) + 1);
    path.values[0] = 0.0;
    const double scale = std::sqrt(dt);
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        path.values[k] = path.values[k - 1] + scale * stream.next_standard_normal();
    }
    return path;
}

ContinuumLocalTime::ContinuumLocalTime(double h, double origin, double t, double dt, std::int64_t first_bin,
                                       std::vector<std::int64_t> counts)
    : h_(h), origin_(origin), t_(t), dt_(dt), first_bin_(first_bin), counts_(std::move(counts)) {}

std::int64_t ContinuumLocalTime::bin_of(double x) const noexcept {
    return static_cast<std::int64_t>(std::floor((x - origin_) / h_));
}

double ContinuumLocalTime::value(std::int64_t bin) const noexcept {
    if (bin < first_bin_ || bin > last_bin()) return 0.0;
    return static_cast<double>(counts_[static_cast<std::size_t>(bin - first_bin_)]) * dt_ / h_;
}

double ContinuumLocalTime::mass() const noexcept {
    double mass = 0.0;
    for (auto bin = first_bin_; bin <= last_bin(); ++bin) mass += value(bin) * h_;
    return mass;
}

std::int64_t ContinuumLocalTime::step_count() const noexcept {
    std::int64_t total = 0;
    for (auto c : counts_) total += c;
    return total;
}

double ContinuumLocalTime::occupation(double a, double b) const {
    if (!(a < b)) throw std::invalid_argument("occupation needs a < b");
    const auto edge = [this](double x) {
        const double k = (x - origin_) / h_;
        const double rounded = std::round(k);
        if (std::abs(k - rounded) > 1e-9) throw std::invalid_argument("occupation bounds must lie on bin edges");
        return static_cast<std::int64_t>(rounded);
    };
    const auto lo = edge(a);
    const auto hi = edge(b);
    std::int64_t steps = 0;
    for (auto bin = std::max(lo, first_bin_); bin < hi && bin <= last_bin(); ++bin) {
        steps += counts_[static_cast<std::size_t>(bin - first_bin_)];
    }
    return static_cast<double>(steps) * dt_;
}

double ContinuumLocalTime::self_intersection() const noexcept {
    double v = 0.0;
    for (auto bin = first_bin_; bin <= last_bin(); ++bin) {
        const double l = value(bin);
        v += l * l * h_;
    }
    return v;
}

ContinuumLocalTime continuum_local_time(const BrownianPath& path, double t, double h, BinAlignment alignment) {
    if (!(h > 0.0)) throw std::invalid_argument("bin width must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("local time horizon must be positive");
    const auto steps = step_count_for(t, path.dt, "local time horizon");
    if (steps > path.steps()) throw std::out_of_range("local time horizon beyond the path");

    const double origin = alignment == BinAlignment::centered ? -0.5 * h : 0.0;
    const auto first = path.values.begin();
    const auto last = first + steps;
    const auto [lo, hi] = std::minmax_element(first, last);
    const auto bin = [&](double x) { return static_cast<std::int64_t>(std::floor((x - origin) / h)); };
    const auto first_bin = bin(*lo);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bin(*hi) - first_bin + 1), 0);
    for (auto it = first; it != last; ++it) ++counts[static_cast<std::size_t>(bin(*it) - first_bin)];
    return ContinuumLocalTime(h, origin, t, path.dt, first_bin, std::move(counts));
}

double occupation_time(const BrownianPath& path, double t, double a, double b) {
    const auto steps = step_count_for(t, path.dt, "occupation horizon");
    if (steps > path.steps()) throw std::out_of_range("occupation horizon beyond the path");
    std::int64_t inside = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double x = path.values[static_cast<std::size_t>(k)];
        if (a <= x && x < b) ++inside;
    }
    return static_cast<double>(inside) * path.dt;
}

double ks_sample(const ContinuumLocalTime& local_time, rng::RngStream& stream, KsMode mode) {
    if (mode == KsMode::conditional) return rng::sample_gaussian(stream, 0.0, local_time.self_intersection());

    const double root_h = std::sqrt(local_time.bin_width());
    double delta = 0.0;
    for (auto bin = local_time.first_bin(); bin <= local_time.last_bin(); ++bin) {
        const double l = local_time.value(bin);
        if (l == 0.0) continue;
        const auto block = bin >= 0 ? stream.keyed(rng::Domain::scenery_plus, static_cast<std::uint64_t>(bin))
                                    : stream.keyed(rng::Domain::scenery_minus, static_cast<std::uint64_t>(-bin - 1));
        delta += l * root_h * rng::normals_from_block(block)[0];
    }
    return delta;
}

double self_intersection(const ContinuumLocalTime& local_time) { return local_time.self_intersection(); }

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int order) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

void check_settings(int n, const QuadratureSettings& s) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("C(n) needs an even n >= 0");
    if (s.order < 1 || s.panels < 1 || !(s.tolerance > 0.0)) {
        throw std::invalid_argument("quadrature settings need order >= 1, panels >= 1, tolerance > 0");
    }
}

// Composite rule on [0,1] with `panels` equal panels.
template <typename F>
double composite_1d(const GaussRule& rule, int panels, F&& f) {
    const double width = 1.0 / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
        }
    }
    return 0.5 * width * sum;
}

template <typename F>
double composite_2d(const GaussRule& rule, int panels, F&& f) {
    return composite_1d(rule, panels, [&](double r) { return composite_1d(rule, panels, [&](double q) { return f(q, r); }); });
}

double refined(double coarse, double fine, int n, const QuadratureSettings& s) {
    if (std::abs(fine - coarse) > s.tolerance * std::max(1.0, std::abs(fine))) {
        throw NonConvergence("C(" + std::to_string(n) + "): " + std::to_string(s.panels) + " and " +
                             std::to_string(2 * s.panels) + " panels disagree by " +
                             std::to_string(std::abs(fine - coarse)));
    }
    return fine;
}

}  // namespace

double cn_constant(int n, const QuadratureSettings& settings) {
    check_settings(n, settings);
    const auto rule = gauss_legendre(settings.order);
    const int power = n / 2 + 1;
    const auto integrand = [power](double v) { return std::pow(1.0 - v * v, power); };
    const double coarse = composite_1d(rule, settings.panels, integrand);
    const double fine = composite_1d(rule, 2 * settings.panels, integrand);
    return 4.0 / std::sqrt(2.0 * std::numbers::pi) * refined(coarse, fine, n, settings);
}

double cn_constant_double_integral(int n, const QuadratureSettings& settings) {
    check_settings(n, settings);
    const auto rule = gauss_legendre(settings.order);
    const double half_n = 0.5 * n;
    // (q, r) in the unit square -> t = r^2, s = t - (r q)^2; ds dt = 4 r^3 q dq dr.
    const auto integrand = [half_n](double q, double r) {
        const double t = r * r;
        const double gap = r * r * q * q;  // t - s
        const double s = t - gap;
        const double f = std::pow(1.0 - t + s, half_n) / std::sqrt(2.0 * std::numbers::pi * gap);
        return f * 4.0 * r * r * r * q;
    };
    const double coarse = 2.0 * composite_2d(rule, settings.panels, integrand);
    const double fine = 2.0 * composite_2d(rule, 2 * settings.panels, integrand);
    return refined(coarse, fine, n, settings);
}

CnTable cn_table(std::span<const int> orders, const QuadratureSettings& settings) {
    CnTable table;
    table.settings = settings;
    for (int n : orders) table.values[n] = cn_constant(n, settings);
    return table;
}

void write_cn_csv(std::ostream& out, const CnTable& table) {
    out << "n,cn\n";
    for (const auto& [n, c] : table.values) out << n << ',' << csv::real(c) << '\n';
}

std::pair<double, double> scale_limit_pair(double delta, double b, double m) {
    if (m < 0.0) throw std::invalid_argument("m must be nonnegative");
    return {m / std::pow(1.0 + m, 0.75) * delta, b / std::sqrt(1.0 + m)};
}

LimitSampleSet simulate_limit_samples(const LimitSettings& settings) {
    if (settings.replicas == 0) throw std::invalid_argument("limit samples need at least one replica");
    LimitSampleSet set;
    set.settings = settings;
    set.samples = map_replicas(settings.replicas, settings.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(settings.seed, r).split(settings.family);
        auto path_stream = base.split(rng::role::brownian);
        auto noise = base.split(rng::role::scenery_noise);
        const auto path = simulate_brownian(settings.horizon, settings.dt, path_stream);
        const auto lt = continuum_local_time(path, settings.horizon, settings.h);
        LimitSample s;
        // Integral mode uses keyed draws only, so it leaves `noise` untouched.
        s.delta_integral = ks_sample(lt, noise, KsMode::integral);
        s.delta = settings.mode == KsMode::integral ? s.delta_integral : ks_sample(lt, noise, settings.mode);
        s.b = path.values.back();
        s.v = lt.self_intersection();
        s.l0 = lt.at(0.0);
        s.mass = lt.mass();
        return s;
    });
    return set;
}

void write_limit_csv(std::ostream& out, const LimitSampleSet& set) {
    out << "replica,delta1,b1,v1\n";
    for (std::size_t r = 0; r < set.samples.size(); ++r) {
        const auto& s = set.samples[r];
        out << r << ',' << csv::real(s.delta) << ',' << csv::real(s.b) << ',' << csv::real(s.v) << '\n';
    }
}

SelfSimilarityReport self_similarity_check(std::span<const LimitSample> at_t, std::span<const LimitSample> at_ct,
                                           double c, double delta_index, double b_index) {
    if (!(c > 0.0)) throw std::invalid_argument("self-similarity factor must be positive");
    std::vector<double> d_t, d_ct, b_t, b_ct;
    for (const auto& s : at_t) {
        d_t.push_back(s.delta);
        b_t.push_back(s.b);
    }
    const double d_scale = std::pow(c, -delta_index);
    const double b_scale = std::pow(c, -b_index);
    for (const auto& s : at_ct) {
        d_ct.push_back(d_scale * s.delta);
        b_ct.push_back(b_scale * s.b);
    }
    SelfSimilarityReport report;
    report.c = c;
    report.delta_index = delta_index;
    report.b_index = b_index;
    report.delta_ks = stats::ks_two_sample(d_ct, d_t);
    report.b_ks = stats::ks_two_sample(b_ct, b_t);
    return report;
}

}  // namespace walklab::limit
