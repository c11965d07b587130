#include "walklab/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "walklab/csv.hpp"
#include "walklab/embedding.hpp"
#include "walklab/errors.hpp"
#include "walklab/lattice.hpp"
#include "walklab/parallel.hpp"
#include "walklab/plot.hpp"
#include "walklab/scaling_limit.hpp"
#include "walklab/stats.hpp"

namespace walklab::experiments {

namespace {

using config::ExperimentConfig;
using report::CriterionResult;
using report::ExperimentReport;

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"vertical-donsker", "n^{-1/2} Y_n of the vertical walk against N(0,1)", {"AC-8"}, {"2/3"}, {10000}, 10000, 100},
        {"scenery-flt", "scenery sum Z_n: variance growth n^{3/2} and n^{-3/4} Z_n against Delta_1",
         {"AC-6", "AC-8"}, {"2/3"}, {1000, 10000, 100000}, 10000, 100},
        {"joint-flt", "lattice walk M_n: variance constants and laws of (n^{-3/4} M1, n^{-1/2} M2)",
         {"AC-7", "AC-8"}, {"2/3"}, {10000}, 10000, 100},
        {"embedding-identities", "coupled lattice walk and embedding: exact path identities", {"AC-1", "AC-2"},
         {"2/3", "1/2"}, {1000}, 100, 1},
        {"stopping-ratio", "T_n / n against 1 + m", {"AC-3"}, {"2/3"}, {100000}, 1, 1},
        {"sup-localtime", "decay of the median of n^{-3/4} sup_y N_n(y)", {"AC-10"}, {"2/3"}, {1000, 10000, 100000},
         1000, 1},
        {"dependence", "moments of (V_1, B_1), characteristic function of Delta_1, local time at 0",
         {"AC-5", "AC-9", "AC-11"}, {"2/3"}, {1}, 20000, stats::kDependenceMinSamples},
        {"cn-quadrature", "C(n) by quadrature against the Beta closed form", {"AC-4"}, {"2/3"}, {2, 4, 6, 8}, 1, 1},
        {"self-similarity", "Delta_2 against 2^{3/4} Delta_1 and B_2 against 2^{1/2} B_1", {"AC-12"}, {"2/3"}, {1},
         10000, 100},
        {"tightness-diagnostic", "E|X_[nt] - X_[nt1]|^2 / (n (t - t1))^{3/2} over an (n, t - t1) grid", {"AC-13"},
         {"2/3"}, {1000, 3162, 10000}, 2000, 2},
    };
    return entries;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Writes the experiment's files and records them in the report.
class Output {
public:
    Output(const ExperimentConfig& config, ExperimentReport& report) : dir_(config.out), report_(report) {}

    void csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ostringstream text;
        body(text);
        write(name, text.str());
    }

    void plot(const std::string& csv_name, const std::string& spec) {
        const auto svg = std::filesystem::path(csv_name).replace_extension(".svg").string();
        plot::emit_plot(dir_ / csv_name, spec + ";out=" + (dir_ / svg).string());
        report_.outputs.push_back(svg);
    }

private:
    void write(const std::string& name, const std::string& text) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        out << text;
        report_.outputs.push_back(name);
    }

    std::filesystem::path dir_;
    ExperimentReport& report_;
};

CriterionResult ks_result(std::string criterion, std::string name, const stats::KsResult& ks, bool expect_reject,
                          std::uint64_t seed) {
    CriterionResult r;
    r.criterion = std::move(criterion);
    r.name = std::move(name);
    r.estimate = ks.statistic;
    r.statistic = ks.p_value;
    r.threshold = stats::kKsLevel;
    r.rule = expect_reject ? "KS p-value < threshold (rejected)" : "KS p-value >= threshold (not rejected)";
    r.passed = expect_reject ? ks.rejected() : !ks.rejected();
    r.n_samples = std::min(ks.n_a, ks.n_b);
    r.seed = seed;
    return r;
}

CriterionResult identity_result(std::string criterion, std::string name, std::size_t violations,
                                std::size_t checks, std::uint64_t seed) {
    CriterionResult r;
    r.criterion = std::move(criterion);
    r.name = std::move(name);
    r.kind = report::Kind::identity;
    r.estimate = static_cast<double>(violations);
    r.statistic = static_cast<double>(violations);
    r.rule = "violations == 0";
    r.passed = violations == 0;
    r.n_samples = checks;
    r.seed = seed;
    return r;
}

std::string at_n(const std::string& what, std::int64_t n) { return what + " at n=" + std::to_string(n); }

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Empirical CDFs of each sample on an even grid over [lo, hi].
void write_ecdf(std::ostream& out, const std::vector<std::string>& names, std::vector<std::vector<double>> samples,
                double lo, double hi, bool with_gaussian) {
    out << "x";
    for (const auto& n : names) out << ',' << n;
    if (with_gaussian) out << ",gaussian";
    out << '\n';
    for (auto& s : samples) std::sort(s.begin(), s.end());
    constexpr int kPoints = 121;
    for (int i = 0; i < kPoints; ++i) {
        const double x = lo + (hi - lo) * i / (kPoints - 1);
        out << csv::real(x);
        for (const auto& s : samples) {
            const auto below = std::upper_bound(s.begin(), s.end(), x) - s.begin();
            out << ',' << csv::real(static_cast<double>(below) / static_cast<double>(s.size()));
        }
        if (with_gaussian) out << ',' << csv::real(gaussian_cdf(x));
        out << '\n';
    }
}

limit::LimitSampleSet limit_samples(const ExperimentConfig& c, double horizon, std::uint64_t family,
                                    std::size_t replicas) {
    limit::LimitSettings s;
    s.horizon = horizon;
    s.dt = c.dt;
    s.h = c.h;
    s.replicas = replicas;
    s.seed = c.seed;
    s.family = family;
    s.mode = limit::KsMode::conditional;
    s.threads = c.threads;
    return limit::simulate_limit_samples(s);
}

// Grid point used for the single-n acceptance checks of multi-n experiments.
std::size_t middle_index(const ExperimentConfig& c) { return c.n_grid.size() / 2; }

// -------------------------------------------------------------------------

void vertical_donsker(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto n_max = grid.back();
    struct Row {
        std::vector<double> y;  // n^{-1/2} Y_n per grid point
        double gaussian = 0.0;
    };
    const auto rows = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(c.seed, r);
        auto walk = base.split(rng::role::vertical);
        Row row;
        std::int64_t y = 0;
        std::size_t g = 0;
        for (std::int64_t k = 1; k <= n_max; ++k) {
            y += walk.next_bit() ? 1 : -1;
            if (k == grid[g]) {
                row.y.push_back(static_cast<double>(y) / std::sqrt(static_cast<double>(k)));
                ++g;
            }
        }
        auto reference = base.split(rng::role::reference);
        row.gaussian = reference.next_standard_normal();
        return row;
    });

    std::vector<std::pair<double, double>> var_points;
    std::vector<stats::Estimate> vars;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> ys;
        for (const auto& row : rows) ys.push_back(row.y[g]);
        vars.push_back(stats::variance_estimate(ys));
        rep.add(report::within("vertical.var", at_n("Var(Y_n)/n", grid[g]), vars.back().value,
                               vars.back().std_error, 1.0, 0.03, c.replicas, c.seed));
        var_points.emplace_back(static_cast<double>(grid[g]), vars.back().value * static_cast<double>(grid[g]));
    }
    if (grid.size() >= 3) {
        const auto fit = stats::scaling_fit(var_points);
        rep.add(report::within("vertical.slope", "log-log slope of Var(Y_n)", fit.slope, 0.0, 1.0, 0.03, c.replicas,
                               c.seed));
    }

    std::vector<double> last, gaussian;
    for (const auto& row : rows) {
        last.push_back(row.y.back());
        gaussian.push_back(row.gaussian);
    }
    rep.add(ks_result("AC-8", at_n("KS n^{-1/2} Y_n vs N(0,1)", n_max), stats::ks_two_sample(last, gaussian), false,
                      c.seed));

    out.csv("vertical_variance.csv", [&](std::ostream& o) {
        o << "n,var_ratio,stderr\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            o << grid[g] << ',' << csv::real(vars[g].value) << ',' << csv::real(vars[g].std_error) << '\n';
        }
    });
    out.csv("vertical_samples.csv", [&](std::ostream& o) {
        o << "replica,y_scaled,gaussian\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            o << r << ',' << csv::real(rows[r].y.back()) << ',' << csv::real(rows[r].gaussian) << '\n';
        }
    });
    out.csv("vertical_ecdf.csv", [&](std::ostream& o) { write_ecdf(o, {"y_scaled"}, {last}, -3.5, 3.5, true); });
    out.plot("vertical_ecdf.csv", "x=x;y=y_scaled,gaussian;title=ECDF of n^-1/2 Y_n");
}

void scenery_flt(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto ends = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(c.seed, r);
        auto walk = base.split(rng::role::vertical);
        auto field = lattice::OrientationField::random(base.split(rng::role::field));
        return embedding::scenery_endpoints(grid, walk, field);
    });
    const double c0 = limit::cn_constant(0);

    std::vector<stats::Estimate> var_z, var_y;
    std::vector<std::pair<double, double>> z_points, y_points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double n = static_cast<double>(grid[g]);
        std::vector<double> zs, ys;
        for (const auto& e : ends) {
            zs.push_back(static_cast<double>(e[g].z) / std::pow(n, 0.75));
            ys.push_back(static_cast<double>(e[g].y) / std::sqrt(n));
        }
        var_z.push_back(stats::variance_estimate(zs));
        var_y.push_back(stats::variance_estimate(ys));
        z_points.emplace_back(n, var_z.back().value * std::pow(n, 1.5));
        y_points.emplace_back(n, var_y.back().value * n);
    }

    const auto mid = middle_index(c);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        rep.add(report::within(g == mid ? "AC-6" : "scenery.var", at_n("Var(Z_n)/n^{3/2} vs C(0)", grid[g]),
                               var_z[g].value, var_z[g].std_error, c0, 0.06, c.replicas, c.seed));
    }
    if (grid.size() >= 3) {
        const auto fz = stats::scaling_fit(z_points);
        rep.add(report::within("AC-6", "log-log slope of Var(Z_n)", fz.slope, 0.0, 1.5, 0.05, c.replicas, c.seed));
        const auto fy = stats::scaling_fit(y_points);
        rep.add(report::within("scenery.var-y-slope", "log-log slope of Var(Y_n)", fy.slope, 0.0, 1.0, 0.03,
                               c.replicas, c.seed));
    }

    const auto limit_set = limit_samples(c, 1.0, 1, c.replicas);
    std::vector<double> z_mid, delta;
    for (const auto& e : ends) {
        z_mid.push_back(static_cast<double>(e[mid].z) / std::pow(static_cast<double>(grid[mid]), 0.75));
    }
    for (const auto& s : limit_set.samples) delta.push_back(s.delta);
    rep.add(ks_result("AC-8", at_n("KS n^{-3/4} Z_n vs Delta_1", grid[mid]), stats::ks_two_sample(z_mid, delta),
                      false, c.seed));

    out.csv("scenery_variance.csv", [&](std::ostream& o) {
        o << "n,var_z,var_y,var_z_ratio,var_z_ratio_stderr\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            o << grid[g] << ',' << csv::real(z_points[g].second) << ',' << csv::real(y_points[g].second) << ','
              << csv::real(var_z[g].value) << ',' << csv::real(var_z[g].std_error) << '\n';
        }
    });
    out.csv("scenery_samples.csv", [&](std::ostream& o) {
        o << "replica,z_scaled,delta1\n";
        for (std::size_t r = 0; r < z_mid.size(); ++r) {
            o << r << ',' << csv::real(z_mid[r]) << ',' << csv::real(delta[r]) << '\n';
        }
    });
    out.csv("scenery_ecdf.csv", [&](std::ostream& o) { write_ecdf(o, {"z_scaled", "delta1"}, {z_mid, delta}, -4, 4, false); });
    out.plot("scenery_variance.csv", "x=n;y=var_z,var_y;scale=loglog;kind=line;title=Var(Z_n) and Var(Y_n)");
    out.plot("scenery_ecdf.csv", "x=x;y=z_scaled,delta1;title=ECDF of n^-3/4 Z_n and Delta_1");
}

void joint_flt(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto& param = c.param();
    const double p = param.p();
    const double m = param.m();
    const auto ends = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(c.seed, r);
        auto field = lattice::OrientationField::random(base.split(rng::role::field));
        auto stream = base.split(rng::role::lattice);
        std::vector<lattice::LatticeState> at;
        lattice::LatticeState state;
        std::size_t g = 0;
        for (std::int64_t k = 1; k <= grid.back(); ++k) {
            state = lattice::step_lattice(state, field, p, stream);
            if (k == grid[g]) {
                at.push_back(state);
                ++g;
            }
        }
        return at;
    });
    const double ref1 = m * m / std::pow(1.0 + m, 1.5) * limit::cn_constant(0);
    const auto last = grid.size() - 1;

    std::vector<stats::Estimate> v1, v2;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double n = static_cast<double>(grid[g]);
        std::vector<double> m1, m2;
        for (const auto& e : ends) {
            m1.push_back(static_cast<double>(e[g].x) / std::pow(n, 0.75));
            m2.push_back(static_cast<double>(e[g].y) / std::sqrt(n));
        }
        v1.push_back(stats::variance_estimate(m1));
        v2.push_back(stats::variance_estimate(m2));
        const auto id = g == last ? std::string("AC-7") : std::string("joint.var");
        rep.add(report::within(id, at_n("Var(M1_n)/n^{3/2} vs m^2 (1+m)^{-3/2} C(0)", grid[g]), v1.back().value,
                               v1.back().std_error, ref1, 0.01, c.replicas, c.seed));
        rep.add(report::within(id, at_n("Var(M2_n)/n vs p", grid[g]), v2.back().value, v2.back().std_error, p, 0.02,
                               c.replicas, c.seed));
    }

    const auto limit_set = limit_samples(c, 1.0, 2, c.replicas);
    std::vector<double> m1, m2, dm, bm;
    const double n = static_cast<double>(grid[last]);
    for (const auto& e : ends) {
        m1.push_back(static_cast<double>(e[last].x) / std::pow(n, 0.75));
        m2.push_back(static_cast<double>(e[last].y) / std::sqrt(n));
    }
    for (const auto& s : limit_set.samples) {
        const auto [d, b] = limit::scale_limit_pair(s.delta, s.b, m);
        dm.push_back(d);
        bm.push_back(b);
    }
    rep.add(ks_result("AC-8", at_n("KS n^{-3/4} M1_n vs Delta^(m)_1", grid[last]), stats::ks_two_sample(m1, dm),
                      false, c.seed));
    rep.add(ks_result("AC-8", at_n("KS n^{-1/2} M2_n vs B^(m)_1", grid[last]), stats::ks_two_sample(m2, bm), false,
                      c.seed));

    out.csv("joint_variance.csv", [&](std::ostream& o) {
        o << "n,var_m1_ratio,var_m1_stderr,var_m2_ratio,var_m2_stderr\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            o << grid[g] << ',' << csv::real(v1[g].value) << ',' << csv::real(v1[g].std_error) << ','
              << csv::real(v2[g].value) << ',' << csv::real(v2[g].std_error) << '\n';
        }
    });
    out.csv("joint_samples.csv", [&](std::ostream& o) {
        o << "replica,m1_scaled,m2_scaled,delta_m,b_m\n";
        for (std::size_t r = 0; r < m1.size(); ++r) {
            o << r << ',' << csv::real(m1[r]) << ',' << csv::real(m2[r]) << ',' << csv::real(dm[r]) << ','
              << csv::real(bm[r]) << '\n';
        }
    });
    out.csv("joint_ecdf.csv", [&](std::ostream& o) {
        write_ecdf(o, {"m1_scaled", "delta_m", "m2_scaled", "b_m"}, {m1, dm, m2, bm}, -3, 3, false);
    });
    out.plot("joint_ecdf.csv", "x=x;title=ECDF of the rescaled lattice walk and its limit");
}

void embedding_identities(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto n_vertical = c.n_grid.back();
    struct Counts {
        std::size_t decomposition = 0;
        std::size_t literal_x = 0;
        std::size_t literal_t = 0;
        std::size_t inverse = 0;
        std::size_t monotone = 0;
    };
    std::size_t coupling_checks = 0;
    Counts total;
    std::vector<std::pair<double, Counts>> rows;
    std::optional<embedding::CoupledRun> first;

    for (std::size_t pi = 0; pi < c.p.size(); ++pi) {
        const auto& param = c.p[pi].param;
        const double m = param.m();
        auto per_replica = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
            const auto replica = pi * c.replicas + r;
            // Throws IdentityViolation when M_{T_n} = (X_n, Y_n) fails.
            auto run = embedding::coupled_simulation(n_vertical, param, c.seed, replica);
            const auto base = rng::make_stream(c.seed, replica);
            auto field = lattice::OrientationField::random(base.split(rng::role::field));
            auto jumps = embedding::JumpFamily::random(base.split(rng::role::jumps), param);
            const auto& e = run.embedded;
            Counts k;
            for (std::int64_t n = 1; n <= n_vertical; ++n) {
                const auto i = static_cast<std::size_t>(n);
                const double x1 = embedding::centered_horizontal(e.y, field, jumps, n);
                if (static_cast<double>(e.x[i]) != x1 + m * static_cast<double>(e.z[i - 1])) ++k.decomposition;
                if (embedding::embed_horizontal(e.y, field, jumps, n) != e.x[i]) ++k.literal_x;
                if (embedding::stopping_time_at(e.y, jumps, n) != e.t[i]) ++k.literal_t;
                if (e.t[i] <= e.t[i - 1]) ++k.monotone;
            }
            for (std::int64_t n = 0; n <= n_vertical; ++n) {
                const auto i = static_cast<std::size_t>(n);
                if (embedding::inverse_times(e.t, e.t[i]) != n) ++k.inverse;
            }
            return std::make_pair(std::move(run), k);
        });
        for (std::size_t r = 0; r < per_replica.size(); ++r) {
            const auto& k = per_replica[r].second;
            total.decomposition += k.decomposition;
            total.literal_x += k.literal_x;
            total.literal_t += k.literal_t;
            total.inverse += k.inverse;
            total.monotone += k.monotone;
            coupling_checks += static_cast<std::size_t>(n_vertical) + 1;
            rows.emplace_back(param.p(), k);
        }
        if (!first) first = std::move(per_replica.front().first);
    }

    const auto paths = c.p.size() * c.replicas;
    const auto checks = paths * static_cast<std::size_t>(n_vertical);
    rep.add(identity_result("AC-1", "M_{T_n} = (X_n, Y_n) for every n on every path", 0, coupling_checks, c.seed));
    rep.add(identity_result("AC-2", "X_n = X_n^(1) + m Z_{n-1} for every n on every path", total.decomposition,
                            checks, c.seed));
    rep.add(identity_result("embedding.literal-x", "incremental X_n equals the double sum", total.literal_x, checks,
                            c.seed));
    rep.add(identity_result("embedding.literal-t", "incremental T_n equals the double sum", total.literal_t, checks,
                            c.seed));
    rep.add(identity_result("embedding.monotone", "T_n strictly increasing", total.monotone, checks, c.seed));
    rep.add(identity_result("embedding.inverse", "U_{T_k} = k", total.inverse, coupling_checks, c.seed));

    out.csv("identity_counts.csv", [&](std::ostream& o) {
        o << "p,replica,decomposition,literal_x,literal_t,monotone,inverse\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& k = rows[i].second;
            o << csv::real(rows[i].first) << ',' << i % c.replicas << ',' << k.decomposition << ',' << k.literal_x
              << ',' << k.literal_t << ',' << k.monotone << ',' << k.inverse << '\n';
        }
    });
    out.csv("embedded_path.csv", [&](std::ostream& o) { embedding::write_embedded_csv(o, first->embedded); });
    out.csv("lattice_path.csv", [&](std::ostream& o) { lattice::write_trajectory_csv(o, first->lattice); });
    out.plot("embedded_path.csv", "x=n;y=x,y,z;title=Embedded walk X_n, Y_n and scenery Z_n");
}

void stopping_ratio(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto& param = c.param();
    const double m = param.m();
    const auto n_max = grid.back();
    struct Row {
        std::vector<double> ratio;  // T_n / n per grid point
        double inverse = 0.0;       // U_{n_max} / n_max
        std::vector<std::pair<std::int64_t, double>> trace;
    };
    const auto rows = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(c.seed, r);
        auto walk = base.split(rng::role::vertical);
        const auto path = embedding::simulate_vertical(n_max, walk);
        auto jumps = embedding::JumpFamily::random(base.split(rng::role::jumps), param);
        const auto t = embedding::stopping_times(path, jumps, n_max);
        Row row;
        for (auto n : grid) row.ratio.push_back(static_cast<double>(t[static_cast<std::size_t>(n)]) / static_cast<double>(n));
        row.inverse = static_cast<double>(embedding::inverse_times(t, n_max)) / static_cast<double>(n_max);
        if (r == 0) {
            for (double e = 1.0; e <= std::log10(static_cast<double>(n_max)) + 1e-9; e += 0.05) {
                const auto k = static_cast<std::int64_t>(std::llround(std::pow(10.0, e)));
                if (row.trace.empty() || row.trace.back().first != k) {
                    row.trace.emplace_back(k, static_cast<double>(t[static_cast<std::size_t>(k)]) / static_cast<double>(k));
                }
            }
        }
        return row;
    });

    for (std::size_t g = 0; g < grid.size(); ++g) {
        double worst = 0.0;
        double sum = 0.0;
        for (const auto& row : rows) {
            worst = std::max(worst, std::abs(row.ratio[g] - (1.0 + m)));
            sum += row.ratio[g];
        }
        auto r = report::within(g + 1 == grid.size() ? "AC-3" : "stopping.ratio",
                                at_n("T_n/n vs 1+m on every path", grid[g]), sum / static_cast<double>(rows.size()),
                                0.0, 1.0 + m, 0.02, rows.size(), c.seed);
        r.statistic = worst;
        r.rule = "max over paths |T_n/n - (1+m)| < threshold";
        r.passed = worst < 0.02;
        rep.add(r);
    }
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, std::abs(row.inverse - 1.0 / (1.0 + m)));
    auto r = report::within("stopping.inverse", at_n("U_n/n vs 1/(1+m) on every path", n_max), rows.front().inverse,
                            0.0, 1.0 / (1.0 + m), 0.02, rows.size(), c.seed);
    r.statistic = worst;
    r.rule = "max over paths |U_n/n - 1/(1+m)| < threshold";
    r.passed = worst < 0.02;
    rep.add(r);

    out.csv("stopping_ratio.csv", [&](std::ostream& o) {
        o << "k,t_over_k,limit\n";
        for (const auto& [k, v] : rows.front().trace) o << k << ',' << csv::real(v) << ',' << csv::real(1.0 + m) << '\n';
    });
    out.plot("stopping_ratio.csv", "x=k;y=t_over_k,limit;title=T_k / k on one path");
}

void sup_localtime(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto rows = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        auto walk = rng::make_stream(c.seed, r).split(rng::role::vertical);
        const auto path = embedding::simulate_vertical(grid.back(), walk);
        std::vector<double> sups;
        for (auto n : grid) {
            sups.push_back(static_cast<double>(embedding::local_time(path, n).sup()) /
                           std::pow(static_cast<double>(n), 0.75));
        }
        return sups;
    });
    std::vector<double> medians;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> v;
        for (const auto& row : rows) v.push_back(row[g]);
        medians.push_back(stats::median(v));
    }
    double worst = 0.0;
    for (std::size_t g = 1; g < medians.size(); ++g) worst = std::max(worst, medians[g] / medians[g - 1]);
    CriterionResult r;
    r.criterion = "AC-10";
    r.name = "median n^{-3/4} sup_y N_n(y) strictly decreasing in n";
    r.estimate = medians.back();
    r.statistic = worst;
    r.reference = 1.0;
    r.threshold = 1.0;
    r.rule = "max ratio of consecutive medians < threshold";
    r.passed = medians.size() >= 2 && worst < 1.0;
    r.n_samples = c.replicas;
    r.seed = c.seed;
    rep.add(r);

    out.csv("sup_localtime.csv", [&](std::ostream& o) {
        o << "n,median_scaled_sup\n";
        for (std::size_t g = 0; g < grid.size(); ++g) o << grid[g] << ',' << csv::real(medians[g]) << '\n';
    });
    out.plot("sup_localtime.csv", "x=n;y=median_scaled_sup;scale=loglog;title=Median of n^-3/4 sup N_n");
}

void dependence(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto set = limit_samples(c, 1.0, 0, c.replicas);
    const auto& samples = set.samples;
    const std::array<int, 3> orders = {0, 2, 4};
    const auto table = limit::cn_table(orders);

    const auto d2 = stats::dependence_test(samples, 2, table);
    rep.add(report::within("AC-5", "E[V_1 B_1^2] vs C(2)", d2.joint.value, d2.joint.std_error, d2.reference_joint,
                           0.04, d2.count, c.seed));
    rep.add(report::within("AC-5", "E[V_1] vs C(0)", d2.v_mean.value, d2.v_mean.std_error, table.at(0), 0.05,
                           d2.count, c.seed));
    {
        CriterionResult r;
        r.criterion = "AC-5";
        r.name = "E[V_1 B_1^2] - E[V_1] E[B_1^2]: 4-stderr CI below 0";
        r.estimate = d2.difference.value;
        r.std_error = d2.difference.std_error;
        r.reference = d2.reference_difference;
        r.threshold = stats::kCiStderrs;
        r.statistic = d2.difference.hi();
        r.rule = "estimate + threshold * stderr < 0";
        r.passed = d2.difference.hi() < 0.0;
        r.n_samples = d2.count;
        r.seed = c.seed;
        rep.add(r);
    }
    const auto d4 = stats::dependence_test(samples, 4, table);
    rep.add(report::within("dependence.n4", "E[V_1 B_1^4] vs 3 C(4)", d4.joint.value, d4.joint.std_error,
                           d4.reference_joint, stats::kCiStderrs * d4.joint.std_error, d4.count, c.seed));

    std::vector<double> delta2, b2, delta, v_weight, l0;
    double mass_dev = 0.0;
    for (const auto& s : samples) {
        delta.push_back(s.delta);
        delta2.push_back(s.delta * s.delta);
        b2.push_back(s.b * s.b);
        v_weight.push_back(std::exp(-0.5 * s.v));
        l0.push_back(s.l0);
        mass_dev = std::max(mass_dev, std::abs(s.mass - 1.0));
    }
    {
        const auto cov = stats::covariance_estimate(delta2, b2);
        CriterionResult r;
        r.criterion = "dependence.delta-squared";
        r.name = "Cov(Delta_1^2, B_1^2): 4-stderr CI below 0";
        r.estimate = cov.value;
        r.std_error = cov.std_error;
        r.reference = table.at(2) - table.at(0);
        r.threshold = stats::kCiStderrs;
        r.statistic = cov.hi();
        r.rule = "estimate + threshold * stderr < 0";
        r.passed = cov.hi() < 0.0;
        r.n_samples = cov.count;
        r.seed = c.seed;
        rep.add(r);
    }
    {
        const auto cf = stats::empirical_char_fn(delta, 1.0);
        const auto ev = stats::mean_estimate(v_weight);
        const double combined = std::hypot(cf.std_error_re, ev.std_error);
        CriterionResult r;
        r.criterion = "AC-9";
        r.name = "mean cos(Delta_1) vs mean exp(-V_1/2)";
        r.estimate = cf.re;
        r.std_error = combined;
        r.reference = ev.value;
        r.threshold = stats::kCiStderrs * combined;
        r.statistic = std::abs(cf.re - ev.value);
        r.rule = "|estimate - reference| < 4 combined stderr";
        r.passed = r.statistic < r.threshold;
        r.n_samples = cf.count;
        r.seed = c.seed;
        rep.add(r);
    }
    {
        std::vector<double> integral;
        for (const auto& s : samples) integral.push_back(s.delta_integral);
        const auto cf = stats::empirical_char_fn(integral, 1.0);
        const auto ev = stats::mean_estimate(v_weight);
        const double combined = std::hypot(cf.std_error_re, ev.std_error);
        CriterionResult r;
        r.criterion = "dependence.char-fn-integral";
        r.name = "mean cos(Delta_1) vs mean exp(-V_1/2), integral-mode Delta";
        r.estimate = cf.re;
        r.std_error = combined;
        r.reference = ev.value;
        r.threshold = stats::kCiStderrs * combined;
        r.statistic = std::abs(cf.re - ev.value);
        r.rule = "|estimate - reference| < 4 combined stderr";
        r.passed = r.statistic < r.threshold;
        r.n_samples = cf.count;
        r.seed = c.seed;
        rep.add(r);
        rep.add(ks_result("dependence.modes", "KS conditional vs integral Delta_1", stats::ks_two_sample(delta, integral),
                          false, c.seed));
    }
    const auto el0 = stats::mean_estimate(l0);
    rep.add(report::within("AC-11", "E[L_1(0)] vs sqrt(2/pi)", el0.value, el0.std_error,
                           std::sqrt(2.0 / std::numbers::pi), 0.02, el0.count, c.seed));
    {
        auto r = report::within("AC-11", "occupation mass sum L h = 1 on every path", mass_dev, 0.0, 0.0, 1e-12,
                                samples.size(), c.seed);
        r.kind = report::Kind::identity;
        r.rule = "max over paths |sum L h - 1| < threshold";
        rep.add(r);
    }

    out.csv("limit_samples.csv", [&](std::ostream& o) { limit::write_limit_csv(o, set); });
    out.csv("cn.csv", [&](std::ostream& o) { limit::write_cn_csv(o, table); });
    out.csv("conditional_v.csv", [&](std::ostream& o) {
        // E[V_1 | B_1 in bin] over bins of width 0.25.
        constexpr double kWidth = 0.25;
        std::map<int, std::pair<double, std::size_t>> bins;
        for (const auto& s : samples) {
            auto& [sum, count] = bins[static_cast<int>(std::floor(s.b / kWidth))];
            sum += s.v;
            ++count;
        }
        o << "b,mean_v,c0\n";
        for (const auto& [k, acc] : bins) {
            if (acc.second < 50) continue;
            o << csv::real((k + 0.5) * kWidth) << ',' << csv::real(acc.first / static_cast<double>(acc.second)) << ','
              << csv::real(table.at(0)) << '\n';
        }
    });
    out.plot("conditional_v.csv", "x=b;y=mean_v,c0;kind=line;title=E[V_1 | B_1] against E[V_1]");
}

void cn_quadrature(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    std::vector<int> orders = {0};
    for (auto n : c.n_grid) {
        if (n % 2 != 0) throw ConfigError("cn-quadrature needs even orders n");
        if (n != 0) orders.push_back(static_cast<int>(n));
    }
    const auto table = limit::cn_table(orders);
    const double root = std::sqrt(2.0 * std::numbers::pi);
    const auto closed = [&](int n) { return 2.0 * std::beta(0.5, n / 2.0 + 2.0) / root; };
    std::map<int, double> double_integral;
    for (int n : orders) double_integral[n] = limit::cn_constant_double_integral(n);

    rep.add(report::within("AC-4", "C(0) vs 8/(3 sqrt(2 pi))", table.at(0), 0.0, 8.0 / (3.0 * root), 1e-4, 1, c.seed));
    const double c2 = limit::cn_constant(2);
    rep.add(report::within("AC-4", "C(2) vs 32/(15 sqrt(2 pi))", c2, 0.0, 32.0 / (15.0 * root), 1e-4, 1, c.seed));
    for (int n : orders) {
        rep.add(report::within("cn.beta", "C(" + std::to_string(n) + ") vs 2 Beta(1/2, n/2+2)/sqrt(2 pi)",
                               table.at(n), 0.0, closed(n), 1e-10, 1, c.seed));
        rep.add(report::within("cn.double-integral", "C(" + std::to_string(n) + ") reduction vs double integral",
                               table.at(n), 0.0, double_integral[n], 1e-10, 1, c.seed));
    }

    out.csv("cn.csv", [&](std::ostream& o) {
        o << "n,cn,closed_form,double_integral\n";
        for (int n : orders) {
            o << n << ',' << csv::real(table.at(n)) << ',' << csv::real(closed(n)) << ','
              << csv::real(double_integral[n]) << '\n';
        }
    });
    out.plot("cn.csv", "x=n;y=cn;kind=scatter;title=C(n)");
}

void self_similarity(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    constexpr double kC = 2.0;
    const auto one = limit_samples(c, 1.0, 3, c.replicas);
    const auto two = limit_samples(c, kC, 4, c.replicas);
    const auto check = limit::self_similarity_check(one.samples, two.samples, kC);
    const auto wrong = limit::self_similarity_check(one.samples, two.samples, kC, 0.5, 0.5);
    rep.add(ks_result("AC-12", "KS 2^{-3/4} Delta_2 vs Delta_1", check.delta_ks, false, c.seed));
    rep.add(ks_result("AC-12", "KS 2^{-1/2} B_2 vs B_1", check.b_ks, false, c.seed));
    rep.add(ks_result("AC-12", "KS 2^{-1/2} Delta_2 vs Delta_1 (wrong index, must reject)", wrong.delta_ks, true,
                      c.seed));

    std::vector<double> d1, d2, b1, b2;
    for (const auto& s : one.samples) {
        d1.push_back(s.delta);
        b1.push_back(s.b);
    }
    for (const auto& s : two.samples) {
        d2.push_back(std::pow(kC, -0.75) * s.delta);
        b2.push_back(std::pow(kC, -0.5) * s.b);
    }
    out.csv("selfsim_samples.csv", [&](std::ostream& o) {
        o << "replica,delta1,b1,delta2_scaled,b2_scaled\n";
        for (std::size_t r = 0; r < d1.size(); ++r) {
            o << r << ',' << csv::real(d1[r]) << ',' << csv::real(b1[r]) << ',' << csv::real(d2[r]) << ','
              << csv::real(b2[r]) << '\n';
        }
    });
    out.csv("selfsim_ecdf.csv", [&](std::ostream& o) {
        write_ecdf(o, {"delta1", "delta2_scaled", "b1", "b2_scaled"}, {d1, d2, b1, b2}, -4, 4, false);
    });
    out.plot("selfsim_ecdf.csv", "x=x;title=ECDFs at t=1 and rescaled from t=2");
}

void tightness(const ExperimentConfig& c, ExperimentReport& rep, Output& out) {
    const auto& grid = c.n_grid;
    const auto& param = c.param();
    const std::array<double, 3> gaps = {1.0, 0.5, 0.25};
    constexpr double kT = 1.0;
    // d2[g][j]: squared increments at grid point g and gap j.
    const auto rows = map_replicas(c.replicas, c.threads, [&](std::size_t r) {
        const auto base = rng::make_stream(c.seed, r);
        auto walk = base.split(rng::role::vertical);
        const auto path = embedding::simulate_vertical(grid.back(), walk);
        auto field = lattice::OrientationField::random(base.split(rng::role::field));
        auto jumps = embedding::JumpFamily::random(base.split(rng::role::jumps), param);
        const auto triple = embedding::embed(path, field, jumps);
        std::vector<std::array<double, 3>> d2(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double n = static_cast<double>(grid[g]);
            const auto upper = static_cast<std::size_t>(std::floor(n * kT));
            for (std::size_t j = 0; j < gaps.size(); ++j) {
                const auto lower = static_cast<std::size_t>(std::floor(n * (kT - gaps[j])));
                const double d = static_cast<double>(triple.x[upper] - triple.x[lower]);
                d2[g][j] = d * d;
            }
        }
        return d2;
    });

    std::vector<std::array<stats::Estimate, 3>> ratio(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double n = static_cast<double>(grid[g]);
        for (std::size_t j = 0; j < gaps.size(); ++j) {
            std::vector<double> v;
            for (const auto& row : rows) v.push_back(row[g][j] / std::pow(n * gaps[j], 1.5));
            ratio[g][j] = stats::mean_estimate(v);
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        double lo = ratio[0][j].value, hi = lo;
        for (std::size_t g = 1; g < grid.size(); ++g) {
            lo = std::min(lo, ratio[g][j].value);
            hi = std::max(hi, ratio[g][j].value);
        }
        worst = std::max(worst, hi / lo);
    }
    CriterionResult r;
    r.criterion = "AC-13";
    r.name = "E|X_[nt] - X_[nt1]|^2 / (n (t-t1))^{3/2}: max/min over n per gap";
    r.estimate = ratio.back()[0].value;
    r.std_error = ratio.back()[0].std_error;
    r.reference = param.m() * param.m() * limit::cn_constant(0);
    r.statistic = worst;
    r.threshold = 3.0;
    r.rule = "max over gaps of (max/min over n) < threshold";
    r.passed = worst < 3.0;
    r.n_samples = c.replicas;
    r.seed = c.seed;
    rep.add(r);

    out.csv("tightness.csv", [&](std::ostream& o) {
        o << "n,gap_1,gap_0.5,gap_0.25\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            o << grid[g];
            for (const auto& e : ratio[g]) o << ',' << csv::real(e.value);
            o << '\n';
        }
    });
    out.plot("tightness.csv", "x=n;y=gap_1,gap_0.5,gap_0.25;scale=loglog;title=Normalized increment moments");
}

using Runner = void (*)(const ExperimentConfig&, ExperimentReport&, Output&);

Runner runner_for(const std::string& name) {
    static const std::map<std::string, Runner> runners = {
        {"vertical-donsker", vertical_donsker},
        {"scenery-flt", scenery_flt},
        {"joint-flt", joint_flt},
        {"embedding-identities", embedding_identities},
        {"stopping-ratio", stopping_ratio},
        {"sup-localtime", sup_localtime},
        {"dependence", dependence},
        {"cn-quadrature", cn_quadrature},
        {"self-similarity", self_similarity},
        {"tightness-diagnostic", tightness},
    };
    return runners.at(name);
}

}  // namespace

std::span<const Entry> list_experiments() { return registry(); }

const Entry* find(const std::string& name) {
    for (const auto& e : registry()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = c.experiment;
    j["p"] = nlohmann::ordered_json::array();
    for (const auto& p : c.p) j["p"].push_back(p.text);
    j["n"] = c.n_grid;
    j["replicas"] = c.replicas;
    j["seed"] = c.seed;
    j["dt"] = c.dt;
    j["h"] = c.h;
    return j;
}

report::ExperimentReport run_experiment(const ExperimentConfig& c) {
    config::validate(c);
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec || !std::filesystem::is_directory(c.out)) {
        throw std::runtime_error("cannot create output directory " + c.out.string());
    }
    ExperimentReport rep;
    rep.experiment = c.experiment;
    rep.config = config_echo(c);
    Output out(c, rep);
    const auto start = std::chrono::steady_clock::now();
    runner_for(c.experiment)(c, rep, out);
    rep.timings.emplace_back("total", seconds_since(start));
    return rep;
}

void write_report(const ExperimentConfig& c, const report::ExperimentReport& rep) {
    const auto path = c.out / "report.json";
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << report::to_json(rep).dump(2) << '\n';
}

}  // namespace walklab::experiments
