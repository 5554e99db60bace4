// Acceptance run: every criterion at full size, one PASS/FAIL line each.
// Exit status is the number of failing criteria (0 when all hold).

#include "hessmc/bounds.hpp"
#include "hessmc/config.hpp"
#include "hessmc/geometry.hpp"
#include "hessmc/oracles.hpp"
#include "hessmc/pathsim.hpp"
#include "hessmc/report.hpp"
#include "hessmc/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

using namespace hessmc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

SuiteResult run(const std::string& json) { return run_suite(parse_config(json), 0); }

std::size_t failures(const std::vector<ReportRow>& rows)
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.pass; }));
}

using CellKey = std::tuple<std::string, double, int>;

// Largest std_error / scale over cells, where scale is either the norm or the
// largest magnitude of the reference values of the rows with `prefix`.
double worst_relative_error(const std::vector<ReportRow>& rows, const std::string& prefix, bool use_norm)
{
    std::map<CellKey, std::pair<double, double>> cells;  // (scale accumulator, max se)
    for (const auto& r : rows) {
        if (!starts_with(r.quantity, prefix)) continue;
        auto& [scale, se] = cells[{r.model, r.t, r.x_id}];
        scale = use_norm ? scale + r.bound * r.bound : std::max(scale, std::abs(r.bound));
        se = std::max(se, r.std_error);
    }
    double worst = 0.0;
    for (const auto& [key, v] : cells) {
        const double scale = use_norm ? std::sqrt(v.first) : v.first;
        worst = std::max(worst, v.second / scale);
    }
    return worst;
}

const char* kPoints = R"([
    {"distance": 0.25, "angle": 0.3}, {"distance": 0.5, "angle": 1.1}, {"distance": 1.0, "angle": 2.0},
    {"distance": 1.5, "angle": 2.3}, {"distance": 2.0, "angle": 5.0}])";

Outcome gradient_fidelity()
{
    const Stopwatch clock;
    const SuiteResult r = run(std::string(R"({"suite": "formula-gradient",
        "models": ["euclidean:1", "euclidean:2", "euclidean:3"],
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "horizons": [0.5, 1.0, 2.0], "n_paths": 200000, "n_steps": 200, "seed": 101, "points": )") +
                              kPoints + "}");
    const double elapsed = clock.seconds();
    const std::size_t bad = failures(r.rows);
    const double rel = worst_relative_error(r.rows, "grad_", true);
    return {bad == 0 && rel <= 0.02 && elapsed <= 120.0,
            fmt("%zu rows, %zu outside 3 se, max se/|grad| = %.4f (limit 0.02), %.1f s (limit 120 s)", r.rows.size(),
                bad, rel, elapsed)};
}

Outcome hessian_fidelity()
{
    std::string detail;
    bool pass = true;
    auto part = [&](const char* label, const std::string& json, bool timed) {
        const Stopwatch clock;
        const SuiteResult r = run(json);
        const double elapsed = clock.seconds();
        const std::size_t bad = failures(r.rows);
        const double rel = worst_relative_error(r.rows, "hess_", false);
        const bool ok = bad == 0 && rel <= 0.05 && (!timed || elapsed <= 600.0);
        pass = pass && ok;
        detail += fmt("%s%s: %zu rows, %zu outside 4 se, max se/dominant = %.4f, %.0f s%s", detail.empty() ? "" : "; ",
                      label, r.rows.size(), bad, rel, elapsed, timed ? " (limit 600 s)" : "");
        std::fflush(stdout);
    };
    // The scheme is first order; at 1e6 paths the se is small enough that 200
    // steps leaves a visible O(h) bias (OU worst), hence the finer grids.
    part("flat", std::string(R"({"suite": "formula-hessian",
        "models": ["euclidean:1", "euclidean:2", "euclidean:3"],
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "horizons": [0.5, 1.0, 2.0], "n_paths": 1000000, "n_steps": 400, "seed": 102, "points": )") + kPoints + "}",
         true);
    part("OU", std::string(R"({"suite": "formula-hessian",
        "models": ["euclidean:1:1", "euclidean:2:1", "euclidean:3:1"],
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "horizons": [0.5, 1.0, 2.0], "n_paths": 1000000, "n_steps": 800, "seed": 103, "points": )") + kPoints + "}",
         false);
    // phi = <e_3, x> = cos(distance) >= 0.36 at every point
    part("sphere", R"({"suite": "formula-hessian", "model": "sphere:2:1",
        "function": {"kind": "sphere_linear", "direction": [0, 0, 1]},
        "horizons": [0.5, 1.0, 2.0], "n_paths": 1000000, "n_steps": 200, "seed": 104,
        "points": [{"distance": 0.1, "angle": 0.3}, {"distance": 0.4, "angle": 1.1}, {"distance": 0.7, "angle": 2.0},
                   {"distance": 0.9, "angle": 3.5}, {"distance": 1.2, "angle": 5.0}]})",
         false);
    return {pass, detail};
}

Outcome transport_exactness()
{
    const Stopwatch clock;
    const std::vector<ManifoldModel> models{ManifoldModel::sphere(2), ManifoldModel::sphere(3),
                                            ManifoldModel::hyperbolic(2), ManifoldModel::hyperbolic(3),
                                            ManifoldModel::euclidean(1, 1.0), ManifoldModel::euclidean(2, 1.0)};
    const double T = 1.0;
    const int n_paths = 10000;
    double worst_q = 0.0, worst_ratio = 0.0;
    std::size_t violations = 0, pairs = 0;
    for (const auto& m : models) {
        const int d = m.dimension();
        // Ric_Z = lambda I: (d-1) kappa on space forms, c on OU
        const double lambda = m.kind() == ManifoldKind::euclidean ? m.drift_coefficient() : (d - 1) * m.curvature();
        const Mat expected = std::exp(-0.5 * lambda * T) * Mat::Identity(d, d);
        const TestFunctionK k(-lambda, T);
        const Point x = point_at(m, 0.5, 0.3);
        for (int p = 0; p < n_paths; ++p) {
            PathConfig cfg;
            cfg.horizon = T;
            cfg.n_steps = 100;
            cfg.seed = 301;
            cfg.path_index = static_cast<std::uint64_t>(p);
            cfg.accumulate_hessian = false;
            const PathRecord rec = simulate_path(m, x, cfg, k);
            worst_q = std::max(worst_q, (rec.q_matrix - expected).cwiseAbs().maxCoeff());
            const QBoundCheck q = check_q_bound_pairs(m, x, cfg);
            violations += q.violations;
            pairs += q.pairs;
            worst_ratio = std::max(worst_ratio, q.worst_ratio);
        }
    }
    return {worst_q <= 1e-10 && violations == 0,
            fmt("6 models x %d paths: max |Q - closed form| = %.2e (limit 1e-10), %zu of %zu pairs violate the growth "
                "bound, worst ratio %.6f, %.1f s",
                n_paths, worst_q, violations, pairs, worst_ratio, clock.seconds())};
}

Outcome bound_sweep()
{
    const Stopwatch clock;
    const SuiteResult r = run(R"({"suite": "bound-sweep",
        "models": ["sphere:2:1", "hyperbolic:2:-1", "hyperbolic:3:-1", "euclidean:1:1", "euclidean:2:1"],
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "times": [0.1, 0.25, 0.5, 1.0, 2.0],
        "points": [{"distance": 0.0}, {"distance": 0.3, "angle": 0.7}, {"distance": 0.6, "angle": 0.7},
                   {"distance": 1.0, "angle": 0.7}, {"distance": 1.5, "angle": 0.7}],
        "n_paths": 20000, "seed": 3})");
    std::size_t main_rows = 0, main_bad = 0, clean_rows = 0, clean_bad = 0;
    for (const auto& row : r.rows) {
        if (!starts_with(row.quantity, "hess_ratio_")) continue;
        const bool is_main = row.quantity.find(":main") != std::string::npos;
        (is_main ? main_rows : clean_rows) += 1;
        if (!row.pass) (is_main ? main_bad : clean_bad) += 1;
    }
    const ReportSummary s = summarize("bound-sweep", r.rows);
    return {main_bad == 0 && clean_bad == 0 && s.n_fail == 0,
            fmt("main bound: %zu of %zu entries violated; clean bound: %zu of %zu; worst margin %.4g; "
                "K<0 %s, K>=0 %s; %.1f s",
                main_bad, main_rows, clean_bad, clean_rows, s.worst_margin, r.extra["negative_K"].dump().c_str(),
                r.extra["nonnegative_K"].dump().c_str(), clock.seconds())};
}

Outcome scalar_inequalities()
{
    const Stopwatch clock;
    const SuiteResult r = run(R"({"suite": "scalar-inequalities", "grid": 100, "k_range": [-5, 5], "t_max": 10,
        "sign_points": 2001, "sign_range": 10})");
    const double elapsed = clock.seconds();
    std::map<std::string, std::pair<std::size_t, std::size_t>> by_kind;
    for (const auto& row : r.rows) {
        auto& [n, bad] = by_kind[row.quantity];
        ++n;
        bad += !row.pass;
    }
    std::string detail;
    for (const auto& [name, v] : by_kind) detail += fmt("%s %zu/%zu ok, ", name.c_str(), v.first - v.second, v.first);
    const std::size_t bad = failures(r.rows);
    return {bad == 0 && elapsed <= 5.0, detail + fmt("%.2f s (limit 5 s)", elapsed)};
}

Outcome harnack()
{
    const Stopwatch clock;
    const SuiteResult r = run(R"({"suite": "harnack", "models": ["euclidean:1:1", "euclidean:2:1"],
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "n_triples": 50, "time_range": [0.05, 3.0], "point_radius": 2.0, "exponent_grid": 10, "seed": 5})");
    std::size_t triples = 0, triple_bad = 0, grid_rows = 0, grid_bad = 0;
    for (const auto& row : r.rows) {
        const bool is_triple = starts_with(row.quantity, "log_u");
        (is_triple ? triples : grid_rows) += 1;
        if (!row.pass) (is_triple ? triple_bad : grid_bad) += 1;
    }
    return {triple_bad == 0 && grid_bad == 0 && triples >= 50 && grid_rows >= 2000,
            fmt("%zu of %zu triples violate the inequality; %zu of %zu exponent comparisons fail; %.2f s", triple_bad,
                triples, grid_bad, grid_rows, clock.seconds())};
}

Outcome eigenfunction()
{
    const Stopwatch clock;
    const SuiteResult r = run(R"({"suite": "eigen", "model": "sphere:2:1",
        "function": {"kind": "sphere_linear", "direction": [0, 0, 1]},
        "support_fraction": 0.05, "polar_points": 21, "azimuth_points": 8, "constant_samples": 4000,
        "n_paths": 100000, "seed": 17})");
    std::size_t pointwise = 0, pointwise_bad = 0, uniform_bad = 0, other_bad = 0;
    bool have_uniform = false;
    for (const auto& row : r.rows) {
        if (starts_with(row.quantity, "hess_ratio_")) {
            ++pointwise;
            pointwise_bad += !row.pass;
        } else if (starts_with(row.quantity, "hess_sup")) {
            have_uniform = true;
            uniform_bad += !row.pass;
        } else {
            other_bad += !row.pass;
        }
    }
    return {pointwise > 0 && have_uniform && pointwise_bad == 0 && uniform_bad == 0 && other_bad == 0,
            fmt("%zu of %zu pointwise entries violated, uniform bound %s, %zu failing decay rows; %.1f s",
                pointwise_bad, pointwise, uniform_bad == 0 ? "holds" : "violated", other_bad, clock.seconds())};
}

Outcome gradient_chain()
{
    const Stopwatch clock;
    // (K, t, A/u) grid: 20 x 25 x 20
    std::size_t grid = 0, grid_bad = 0;
    for (int i = 0; i < 20; ++i) {
        const double K = 0.25 * i;
        for (int j = 0; j < 25; ++j) {
            const double t = 0.01 * std::pow(1000.0, j / 24.0);
            for (int l = 0; l < 20; ++l) {
                const double ratio = std::pow(1e6, l / 19.0);
                ++grid;
                grid_bad += li_gradient_bound(K, t, ratio, 1.0) > hamilton_gradient_bound(K, t, ratio, 1.0);
            }
        }
    }

    // analytic |grad u|^2 / u^2 against the Li bound
    const std::vector<AnalyticSolution> solutions{
        AnalyticSolution::euclidean_gaussian(1, Vec::Zero(1), 1.0, 1.0),
        AnalyticSolution::euclidean_gaussian(2, Vec::Zero(2), 1.0, 1.0),
        AnalyticSolution::ou_gaussian(1, 1.0, Vec::Zero(1), 1.0, 1.0),
        AnalyticSolution::ou_gaussian(2, 1.0, Vec::Zero(2), 1.0, 1.0),
        AnalyticSolution::sphere_eigen(2, Vec::Unit(3, 2), 2.0),
        AnalyticSolution::sphere_eigen(3, Vec::Unit(4, 3), 1.5),
    };
    std::size_t sweep = 0, sweep_bad = 0;
    double worst = 1e300;
    for (const auto& sol : solutions) {
        const auto& m = sol.model();
        const double K = curvature_constants(m).K;
        const double A = sol.initial().supremum(m);
        for (double t : {0.1, 0.25, 0.5, 1.0, 2.0}) {
            for (double dist : {0.0, 0.3, 0.6, 1.0, 1.5}) {
                const Point x = point_at(m, dist, 0.7);
                const double u = sol.heat_value(t, x);
                const double lhs = sol.heat_gradient(t, x, canonical_frame(m, x)).squaredNorm() / (u * u);
                const double bound = li_gradient_bound(K, t, A, u);
                ++sweep;
                sweep_bad += lhs > bound;
                worst = std::min(worst, bound - lhs);
            }
        }
    }
    return {grid_bad == 0 && sweep_bad == 0,
            fmt("li > hamilton at %zu of %zu grid points; Li bound violated at %zu of %zu analytic sweep points "
                "(worst margin %.3g); %.2f s",
                grid_bad, grid, sweep_bad, sweep, worst, clock.seconds())};
}

Outcome determinism()
{
    const Stopwatch clock;
    const std::vector<std::string> configs{
        R"({"suite": "formula-gradient", "models": ["euclidean:2", "euclidean:1:1"], "n_paths": 5000, "n_steps": 50,
            "horizons": [0.5, 1], "points": [{"distance": 0.5, "angle": 1}]})",
        R"({"suite": "formula-hessian", "model": "sphere:2:1", "function": {"kind": "sphere_linear"},
            "n_paths": 5000, "n_steps": 50, "points": [{"distance": 0.4}]})",
        R"({"suite": "bound-sweep", "models": ["sphere:2:1", "hyperbolic:3:-1"], "times": [0.25, 1],
            "points": [{"distance": 0.3, "angle": 0.7}], "n_paths": 3000, "n_steps": 40})",
        R"({"suite": "harnack", "n_triples": 10, "exponent_grid": 4})",
        R"({"suite": "eigen", "polar_points": 7, "azimuth_points": 4, "n_paths": 5000, "n_steps": 40})",
        R"({"suite": "scalar-inequalities", "grid": 20, "sign_points": 201})",
        R"({"suite": "convergence", "n_paths": 4096, "rungs": 4})",
    };
    std::size_t mismatched = 0;
    for (const auto& json : configs) {
        const ExperimentConfig cfg = parse_config(json);
        const ReportHeader header{to_string(cfg.suite), fnv1a_hex(cfg.canonical), cfg.seed};
        const std::string first = render_csv(header, run_suite(cfg, 1).rows);
        for (int threads : {1, 2, 4, 7})
            mismatched += render_csv(header, run_suite(parse_config(json), threads).rows) != first;
    }
    return {mismatched == 0, fmt("%zu suites x 4 reruns at 1/2/4/7 threads: %zu CSV mismatches; %.1f s",
                                 configs.size(), mismatched, clock.seconds())};
}

Outcome convergence()
{
    const Stopwatch clock;
    const SuiteResult r = run(R"({"suite": "convergence", "model": "euclidean:1",
        "function": {"kind": "gaussian_bump", "width": 1.0, "amplitude": 1.0},
        "horizon": 1.0, "point": [1.0], "n_paths": 1000000, "rungs": 8, "entry": [0, 0], "seed": 19})");
    double slope = std::nan("");
    bool slope_pass = false;
    for (const auto& row : r.rows)
        if (row.quantity == "weak_error_slope") {
            slope = row.estimate;
            slope_pass = row.pass;
        }
    return {slope_pass && slope >= 0.8,
            fmt("weak-error slope %.3f over 8 doubling rungs (limit 0.8); %zu other rows failing; %.1f s", slope,
                failures(r.rows) - (slope_pass ? 0 : 1), clock.seconds())};
}

}  // namespace

// Optional arguments pick criteria by number; none runs them all.
int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"gradient formula fidelity", gradient_fidelity},
        {"Hessian formula fidelity", hessian_fidelity},
        {"damped transport exactness", transport_exactness},
        {"Hessian bound sweep", bound_sweep},
        {"scalar inequalities", scalar_inequalities},
        {"backward Harnack", harnack},
        {"eigenfunction bound", eigenfunction},
        {"gradient bound chain", gradient_chain},
        {"determinism", determinism},
        {"weak-error convergence", convergence},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int n = std::atoi(argv[a]);
        if (n >= 1 && n <= static_cast<int>(criteria.size())) selected[static_cast<std::size_t>(n - 1)] = true;
    }
    int failed = 0, ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        ++ran;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria failed\n", failed, ran);
    return failed;
}
