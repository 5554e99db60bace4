#include "hessmc/estimators.hpp"

#include "hessmc/ensemble.hpp"
#include "hessmc/random.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hessmc {

namespace {

EnsembleResult run_ensemble(std::size_t n_paths, std::size_t width, const PathSampler& sampler,
                            const EstimatorOptions& opts, std::span<const std::size_t> partners = {})
{
    EnsembleResult result = opts.serial ? run_ensemble_serial(n_paths, width, sampler, partners)
                                        : run_ensemble_parallel(n_paths, width, sampler, opts.threads, partners);
    if (n_paths > 0 && result.rejected == n_paths)
        throw EstimatorError("every simulated path was rejected (non-finite values)");
    return result;
}

MCEstimate make_estimate(const EnsembleResult& r, std::size_t column, std::uint64_t seed)
{
    return MCEstimate{r.moments.mean(column), r.moments.std_error(column), r.n_paths, r.rejected, seed};
}

void check_common(const ManifoldModel& model, const ScalarFunctional& f, double T, std::size_t n_paths)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("horizon T must be positive and finite");
    if (n_paths < 2) throw InputError("n_paths must be at least 2");
    f.check_compatible(model);
}

void check_site(const ManifoldModel& model, const EvaluationSite& site)
{
    if (!on_manifold(model, site.point, 1e-9)) throw InputError("evaluation point is not on the manifold");
    if (!frame_is_orthonormal(model, site.point, site.frame, 1e-9))
        throw InputError("evaluation frame is not orthonormal and tangent");
}

// Carries an endpoint simulated from sites[0] over to another site.
struct Relocation {
    Mat linear;
    Vec offset;
    bool identity = false;

    Vec apply(const Vec& y) const { return identity ? y : Vec(linear * y + offset); }
};

Relocation make_relocation(const ManifoldModel& model, const EvaluationSite& from,
                           const EvaluationSite& to, int n_steps, double h)
{
    Relocation rel;
    if (model.kind() == ManifoldKind::euclidean && model.drift_coefficient() != 0.0) {
        // The discrete walk is y_{n+1} = a y_n + F dB_n with a = 1 - h c / 2,
        // so y_N(x) = R y_N(x0) + a^N (x - R x0) where R maps frame to frame.
        const double contraction = std::pow(1.0 - 0.5 * h * model.drift_coefficient(), n_steps);
        rel.linear = to.frame.basis * from.frame.basis.transpose();
        rel.offset = contraction * (to.point.coords - rel.linear * from.point.coords);
        return rel;
    }
    const AffineMap map = frame_isometry(model, from.point, from.frame, to.point, to.frame);
    rel.linear = map.linear;
    rel.offset = map.offset;
    return rel;
}

std::size_t triangle_size(int d) { return static_cast<std::size_t>(d * (d + 1) / 2); }

}  // namespace

std::vector<SiteEstimate> estimate_at_sites(const ManifoldModel& model, const ScalarFunctional& f,
                                            std::span<const EvaluationSite> sites, double T,
                                            std::size_t n_paths, std::uint64_t seed,
                                            DerivativeOrder order, const EstimatorOptions& opts)
{
    check_common(model, f, T, n_paths);
    if (sites.empty()) throw InputError("at least one evaluation site is required");
    for (const EvaluationSite& site : sites) check_site(model, site);

    const int d = model.dimension();
    const bool want_grad = order != DerivativeOrder::value;
    const bool want_hess = order == DerivativeOrder::hessian;

    PathConfig cfg;
    cfg.horizon = T;
    cfg.n_steps = opts.n_steps > 0 ? opts.n_steps : default_n_steps(T);
    cfg.seed = seed;
    cfg.accumulate_hessian = want_hess;
    cfg.track_q_bound = false;
    cfg.validate(model);
    const TestFunctionK k(curvature_constants(model).K, T);
    const StepGrid grid(model, cfg, k);

    std::vector<Relocation> relocations;
    relocations.reserve(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) {
        if (s == 0) {
            relocations.push_back(Relocation{Mat(), Vec(), true});
            continue;
        }
        relocations.push_back(make_relocation(model, sites[0], sites[s], cfg.n_steps, cfg.step()));
    }

    const std::size_t grad_width = want_grad ? static_cast<std::size_t>(d) : 0;
    const std::size_t hess_width = want_hess ? triangle_size(d) : 0;
    const std::size_t per_site = 1 + grad_width + hess_width;
    const std::size_t width = per_site * sites.size();

    // Each column's covariance partner is its own site's value column.
    std::vector<std::size_t> partners(width);
    for (std::size_t c = 0; c < width; ++c) partners[c] = (c / per_site) * per_site;

    const Point& x0 = sites[0].point;
    const Frame& frame0 = sites[0].frame;

    PathSampler sampler = [&](std::uint64_t path, std::span<double> out) {
        PathConfig local = cfg;
        local.path_index = path;
        const PathRecord rec = simulate_path(model, x0, frame0, local, grid);
        if (!rec.valid) return false;

        double grad_w[kMaxDim];
        double hess_w[kMaxDim * (kMaxDim + 1) / 2];
        for (int i = 0; i < d && want_grad; ++i) grad_w[i] = -rec.grad_integrals[i];
        if (want_hess) {
            std::size_t t = 0;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    hess_w[t++] = -0.5 * (rec.wk_outer_integrals(i, j) + rec.wk_outer_integrals(j, i)) +
                                  rec.nested_integrals(i, j) + rec.nested_integrals(j, i);
        }

        std::size_t c = 0;
        for (const Relocation& rel : relocations) {
            const double fv = f(rel.apply(rec.endpoint.coords));
            out[c++] = fv;
            for (std::size_t i = 0; i < grad_width; ++i) out[c++] = fv * grad_w[i];
            for (std::size_t i = 0; i < hess_width; ++i) out[c++] = fv * hess_w[i];
        }
        return true;
    };

    const EnsembleResult result = run_ensemble(n_paths, width, sampler, opts, partners);
    const SampleMoments& m = result.moments;

    std::vector<SiteEstimate> estimates(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) {
        SiteEstimate& est = estimates[s];
        const std::size_t base = s * per_site;
        est.value = make_estimate(result, base, seed);
        for (std::size_t i = 0; i < grad_width; ++i)
            est.gradient.push_back(make_estimate(result, base + 1 + i, seed));
        if (!want_hess) continue;

        est.hessian = MCMatrix{d, std::vector<MCEstimate>(static_cast<std::size_t>(d * d))};
        est.hessian_ratio = est.hessian;
        const double u = m.mean(base);
        const double var_u = m.variance(base);
        const double n = static_cast<double>(m.count());
        std::size_t t = base + 1 + grad_width;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j, ++t) {
                const MCEstimate entry = make_estimate(result, t, seed);
                est.hessian(i, j) = entry;
                est.hessian(j, i) = entry;

                MCEstimate ratio = entry;
                ratio.mean = entry.mean / u;
                const double r = ratio.mean;
                const double var = m.variance(t) - 2.0 * r * m.covariance_with_partner(t) + r * r * var_u;
                ratio.std_error = std::sqrt(std::max(0.0, var) / n) / std::abs(u);
                est.hessian_ratio(i, j) = ratio;
                est.hessian_ratio(j, i) = ratio;
            }
        }
    }
    return estimates;
}

MCEstimate estimate_semigroup(const ManifoldModel& model, const ScalarFunctional& f, const Point& x,
                              double T, std::size_t n_paths, std::uint64_t seed,
                              const EstimatorOptions& opts)
{
    const EvaluationSite site{x, canonical_frame(model, x)};
    return estimate_at_sites(model, f, {&site, 1}, T, n_paths, seed, DerivativeOrder::value, opts)
        .front()
        .value;
}

std::vector<MCEstimate> estimate_gradient(const ManifoldModel& model, const ScalarFunctional& f,
                                          const Point& x, double T, std::size_t n_paths,
                                          std::uint64_t seed, const EstimatorOptions& opts)
{
    const EvaluationSite site{x, canonical_frame(model, x)};
    return estimate_at_sites(model, f, {&site, 1}, T, n_paths, seed, DerivativeOrder::gradient, opts)
        .front()
        .gradient;
}

MCMatrix estimate_hessian(const ManifoldModel& model, const ScalarFunctional& f, const Point& x,
                          double T, std::size_t n_paths, std::uint64_t seed,
                          const EstimatorOptions& opts)
{
    const EvaluationSite site{x, canonical_frame(model, x)};
    return estimate_at_sites(model, f, {&site, 1}, T, n_paths, seed, DerivativeOrder::hessian, opts)
        .front()
        .hessian;
}

WeakErrorLadder hessian_weak_error_ladder(const ManifoldModel& model, const ScalarFunctional& f,
                                          const Point& x, double T, std::size_t n_paths,
                                          std::uint64_t seed, int n_rungs, int entry_i, int entry_j,
                                          const EstimatorOptions& opts)
{
    check_common(model, f, T, n_paths);
    const int d = model.dimension();
    if (n_rungs < 2 || n_rungs > 16) throw InputError("ladder needs between 2 and 16 rungs");
    if (entry_i < 0 || entry_j < 0 || entry_i >= d || entry_j >= d)
        throw InputError("ladder Hessian entry is out of range");
    const Frame frame = canonical_frame(model, x);
    check_site(model, EvaluationSite{x, frame});

    const int levels = n_rungs + 1;
    const int fine = 1 << n_rungs;
    const TestFunctionK k(curvature_constants(model).K, T);
    const std::size_t n_normals = static_cast<std::size_t>(fine) * static_cast<std::size_t>(d);

    // Columns: Y_0 .. Y_R, then Y_l - Y_{l+1} for l < R.
    const std::size_t width = static_cast<std::size_t>(levels + n_rungs);

    std::vector<PathConfig> configs;
    std::vector<StepGrid> grids;
    for (int level = 0; level < levels; ++level) {
        PathConfig cfg;
        cfg.horizon = T;
        cfg.n_steps = 1 << level;
        cfg.substeps = fine >> level;
        cfg.track_q_bound = false;
        configs.push_back(cfg);
        grids.emplace_back(model, cfg, k);
    }

    PathSampler sampler = [&](std::uint64_t path, std::span<double> out) {
        thread_local std::vector<double> normals;
        normals.resize(n_normals);
        NormalStream stream(seed, path);
        for (double& z : normals) z = stream.next();

        for (int level = 0; level < levels; ++level) {
            const auto lv = static_cast<std::size_t>(level);
            const PathRecord rec = simulate_path_with_normals(model, x, frame, configs[lv], grids[lv], normals);
            if (!rec.valid) return false;
            const double weight =
                -0.5 * (rec.wk_outer_integrals(entry_i, entry_j) + rec.wk_outer_integrals(entry_j, entry_i)) +
                rec.nested_integrals(entry_i, entry_j) + rec.nested_integrals(entry_j, entry_i);
            out[static_cast<std::size_t>(level)] = f(rec.endpoint) * weight;
        }
        for (int level = 0; level < n_rungs; ++level)
            out[static_cast<std::size_t>(levels + level)] =
                out[static_cast<std::size_t>(level)] - out[static_cast<std::size_t>(level + 1)];
        return true;
    };

    const EnsembleResult result = run_ensemble(n_paths, width, sampler, opts);

    WeakErrorLadder ladder;
    std::vector<double> log_n, log_err;
    for (int level = 0; level < n_rungs; ++level) {
        LadderRung rung;
        rung.n_steps = 1 << level;
        rung.estimate = make_estimate(result, static_cast<std::size_t>(level), seed);
        rung.step_difference = make_estimate(result, static_cast<std::size_t>(levels + level), seed);
        ladder.rungs.push_back(rung);
        log_n.push_back(std::log(static_cast<double>(rung.n_steps)));
        log_err.push_back(std::log(std::abs(rung.step_difference.mean)));
    }

    const double n = static_cast<double>(log_n.size());
    const double mean_x = std::accumulate(log_n.begin(), log_n.end(), 0.0) / n;
    const double mean_y = std::accumulate(log_err.begin(), log_err.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxy += (log_n[i] - mean_x) * (log_err[i] - mean_y);
        sxx += (log_n[i] - mean_x) * (log_n[i] - mean_x);
    }
    ladder.slope = -sxy / sxx;
    return ladder;
}

GibbsCheck gibbs_check(std::span<const double> x, std::span<const double> y)
{
    constexpr std::size_t kGroups = 20;
    if (x.size() != y.size()) throw InputError("gibbs_check: X and Y sample sizes differ");
    if (x.size() < kGroups) throw InputError("gibbs_check: at least 20 samples are required");

    // Per-group sums of X Y, X log X, X and e^Y.
    struct Sums {
        double xy = 0.0, xlogx = 0.0, x = 0.0, ey = 0.0, n = 0.0;
    };
    std::vector<Sums> groups(kGroups);
    Sums total;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw InputError("gibbs_check: X must be positive and all samples finite");
        Sums& g = groups[i * kGroups / x.size()];
        const Sums add{x[i] * y[i], x[i] * std::log(x[i]), x[i], std::exp(y[i]), 1.0};
        for (Sums* s : {&g, &total}) {
            s->xy += add.xy;
            s->xlogx += add.xlogx;
            s->x += add.x;
            s->ey += add.ey;
            s->n += 1.0;
        }
    }
    if (total.x == 0.0) throw InputError("gibbs_check: E X vanishes");

    auto evaluate = [](const Sums& s, double& lhs, double& rhs) {
        const double ex = s.x / s.n;
        lhs = s.xy / s.n;
        rhs = s.xlogx / s.n - ex * std::log(ex) + ex * std::log(s.ey / s.n);
    };

    GibbsCheck out;
    evaluate(total, out.lhs, out.rhs);
    out.margin = out.lhs - out.rhs;

    std::vector<double> leave_out(kGroups);
    for (std::size_t g = 0; g < kGroups; ++g) {
        const Sums rest{total.xy - groups[g].xy, total.xlogx - groups[g].xlogx, total.x - groups[g].x,
                        total.ey - groups[g].ey, total.n - groups[g].n};
        double lhs = 0.0, rhs = 0.0;
        evaluate(rest, lhs, rhs);
        leave_out[g] = lhs - rhs;
    }
    const double mean = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / kGroups;
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean) * (v - mean);
    out.std_error = std::sqrt(ss * (kGroups - 1.0) / kGroups);
    return out;
}

MartingaleCheck martingale_exponential_check(const ManifoldModel& model, const Point& x, double T,
                                             std::size_t n_paths, std::uint64_t seed,
                                             const EstimatorOptions& opts)
{
    if (!(T > 0.0)) throw InputError("horizon T must be positive");
    if (n_paths < 2) throw InputError("n_paths must be at least 2");
    const int d = model.dimension();
    const Frame frame = canonical_frame(model, x);
    check_site(model, EvaluationSite{x, frame});

    PathConfig cfg;
    cfg.horizon = T;
    cfg.n_steps = opts.n_steps > 0 ? opts.n_steps : default_n_steps(T);
    cfg.seed = seed;
    cfg.accumulate_hessian = false;
    cfg.track_q_bound = false;
    const TestFunctionK k(curvature_constants(model).K, T);
    const StepGrid grid(model, cfg, k);

    PathSampler sampler = [&](std::uint64_t path, std::span<double> out) {
        PathConfig local = cfg;
        local.path_index = path;
        const PathRecord rec = simulate_path(model, x, frame, local, grid);
        if (!rec.valid) return false;
        for (int i = 0; i < d; ++i) {
            out[static_cast<std::size_t>(i)] = std::exp(rec.grad_integrals[i]);
            out[static_cast<std::size_t>(d + i)] = std::exp(2.0 * rec.quadratic_variation[i]);
        }
        return true;
    };
    const EnsembleResult result = run_ensemble(n_paths, static_cast<std::size_t>(2 * d), sampler, opts);

    MartingaleCheck out;
    out.worst_z = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        const MCEstimate lhs = make_estimate(result, static_cast<std::size_t>(i), seed);
        const MCEstimate bracket = make_estimate(result, static_cast<std::size_t>(d + i), seed);
        const double rhs = std::sqrt(bracket.mean);
        const double se = std::hypot(lhs.std_error, bracket.std_error / (2.0 * rhs));
        out.worst_z = std::max(out.worst_z, (lhs.mean - rhs) / se);
        out.exp_martingale.push_back(lhs);
        out.exp_bracket.push_back(bracket);
    }
    return out;
}

}  // namespace hessmc
