#include "hessmc/pathsim.hpp"

#include "hessmc/random.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace hessmc {

namespace {

Mat symmetric_exp(const Mat& m, double scale)
{
    Eigen::SelfAdjointEigenSolver<Mat> eig(m);
    const Vec scaled = (eig.eigenvalues() * scale).array().exp().matrix();
    return eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().transpose();
}

double operator_norm(const Mat& m)
{
    Eigen::SelfAdjointEigenSolver<Mat> eig(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

using QHistory = std::vector<std::pair<Mat, Mat>>;

// One forward pass of the geodesic random walk. `normal` yields the next
// standard Gaussian. Itô (left-point) evaluation throughout: every
// accumulator update uses the values from before the current step.
template <class NormalSource>
PathRecord run_path(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                    const PathConfig& cfg, const StepGrid& grid, NormalSource&& normal,
                    QHistory* history = nullptr)
{
    const int d = model.dimension();
    const double h = grid.step();
    const double sub_scale = std::sqrt(h / cfg.substeps);
    const double kappa = model.curvature();
    const double K = grid.K();
    const bool with_w = cfg.accumulate_hessian && !model.curvature_free();
    const std::optional<double> tau = model.synthetic_h3();
    const bool flat = model.kind() == ManifoldKind::euclidean;
    const bool drift = model.drift_coefficient() != 0.0;
    // Scalar Q whenever Ric_Z is isotropic, unless the caller wants the history.
    const bool scalar_q = grid.isotropic() && !history;

    PathRecord rec;
    rec.grad_integrals = Vec::Zero(d);
    rec.quadratic_variation = Vec::Zero(d);
    rec.nested_integrals = Mat::Zero(d, d);
    rec.wk_outer_integrals = Mat::Zero(d, d);
    rec.q_bound_violation = cfg.track_q_bound ? 1.0 : std::numeric_limits<double>::quiet_NaN();

    Mat q = Mat::Identity(d, d);
    Mat q_inv = Mat::Identity(d, d);
    double q_scalar = 1.0;
    Vec& grad = rec.grad_integrals;

    // Inner W^k accumulators: inner[(i * d + j) * d + r] is component r of M_ij.
    std::array<double, kMaxDim * kMaxDim * kMaxDim> inner{};

    Point p = x0;
    Frame frame = frame0;
    Vec db(d), qdb(d), r(d), dv(d);

    if (history) history->emplace_back(q, q_inv);

    for (int n = 0; n < cfg.n_steps; ++n) {
        db.setZero();
        for (int j = 0; j < cfg.substeps; ++j)
            for (int i = 0; i < d; ++i)
                db[i] += sub_scale * normal();

        const double kdot = grid.k_derivative(n);
        const double kval = grid.k_value(n);
        if (scalar_q)
            qdb = q_scalar * db;
        else
            qdb.noalias() = q.transpose() * db;

        if (cfg.accumulate_hessian) {
            if (with_w) {
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        const double* m = &inner[(i * d + j) * d];
                        double dot = 0.0;
                        for (int c = 0; c < d; ++c) dot += m[c] * qdb[c];
                        rec.wk_outer_integrals(i, j) += kdot * dot;
                    }
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    rec.nested_integrals(i, j) += grad[i] * kdot * qdb[j];
        }
        for (int i = 0; i < d; ++i) {
            grad[i] += kdot * qdb[i];
            const double col_sq = scalar_q ? q_scalar * q_scalar : q.col(i).squaredNorm();
            rec.quadratic_variation[i] += kdot * kdot * col_sq * h;
        }

        if (with_w) {
            // M_ij += Q^{-1} [ Rm(dB, k Q e_i) Q e_j - (h/2) tau(k Q e_i, Q e_j) ]
            if (scalar_q) {
                // Q = q I: the bracket is q^2 k [kappa(delta_ij dB - dB_j e_i) - (h/2) tau delta_ij e_1].
                const double scale = q_scalar * kval;
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        double* m = &inner[(i * d + j) * d];
                        if (i == j) {
                            for (int c = 0; c < d; ++c) m[c] += scale * kappa * db[c];
                            if (tau) m[0] -= scale * 0.5 * h * (*tau);
                        }
                        m[i] -= scale * kappa * db[j];
                    }
                }
            } else {
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        const auto a = q.col(i);
                        const auto b = q.col(j);
                        const double ab = kval * a.dot(b);
                        const double db_b = db.dot(b);
                        r = kappa * (ab * db - (kval * db_b) * a);
                        if (tau) r[0] -= 0.5 * h * (*tau) * ab;
                        double* m = &inner[(i * d + j) * d];
                        for (int row = 0; row < d; ++row) m[row] += q_inv.row(row).dot(r);
                    }
                }
            }
        }

        dv = db;
        if (drift) dv -= (0.5 * h * model.drift_coefficient()) * (frame.basis.transpose() * p.coords);

        if (scalar_q) {
            q_scalar *= grid.scalar_propagate();
        } else {
            q = grid.propagate() * q;
            q_inv = q_inv * grid.propagate_inverse();
        }
        if (history) history->emplace_back(q, q_inv);
        if (cfg.track_q_bound) {
            const double t = (n + 1) * h;
            const double norm = scalar_q ? std::abs(q_scalar) : operator_norm(q);
            rec.q_bound_violation = std::max(rec.q_bound_violation, norm * std::exp(-0.5 * K * t));
        }

        if (flat)
            p.coords.noalias() += frame.basis * dv;
        else
            geodesic_step_inplace(model, p, frame, dv);
    }

    if (scalar_q) {
        q = Mat::Identity(d, d) * q_scalar;
        q_inv = Mat::Identity(d, d) / q_scalar;
    }
    rec.q_matrix = std::move(q);
    rec.q_inverse = std::move(q_inv);
    rec.endpoint = std::move(p);
    rec.end_frame = std::move(frame);
    rec.valid = rec.endpoint.coords.allFinite() && grad.allFinite() &&
                rec.nested_integrals.allFinite() && rec.wk_outer_integrals.allFinite() &&
                rec.q_matrix.allFinite();
    return rec;
}

}  // namespace

void PathConfig::validate(const ManifoldModel& model) const
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InputError("path horizon must be positive and finite");
    if (n_steps < 1) throw InputError("n_steps must be >= 1");
    if (substeps < 1) throw InputError("substeps must be >= 1");
    (void)model;
}

int default_n_steps(double horizon)
{
    return std::max(100, static_cast<int>(std::ceil(horizon / 1e-2 - 1e-9)));
}

PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const PathConfig& cfg,
                         const TestFunctionK& k)
{
    return simulate_path(model, x0, canonical_frame(model, x0), cfg, k);
}

StepGrid::StepGrid(const ManifoldModel& model, const PathConfig& cfg, const TestFunctionK& k)
    : step_(cfg.step()), K_(curvature_constants(model).K)
{
    cfg.validate(model);
    if (k.horizon() != cfg.horizon) throw InputError("test function horizon differs from the path horizon");
    k_value_.resize(static_cast<std::size_t>(cfg.n_steps));
    k_derivative_.resize(static_cast<std::size_t>(cfg.n_steps));
    for (int n = 0; n < cfg.n_steps; ++n) {
        k_value_[static_cast<std::size_t>(n)] = k.value(n * step_);
        k_derivative_[static_cast<std::size_t>(n)] = k.derivative(n * step_);
    }
    const Mat ric = ricci_z_matrix(model);
    propagate_ = symmetric_exp(ric, -0.5 * step_);
    propagate_inv_ = symmetric_exp(ric, 0.5 * step_);
    const int d = model.dimension();
    const double diag = ric(0, 0);
    isotropic_ = (ric - diag * Mat::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0;
    scalar_propagate_ = std::exp(-0.5 * step_ * diag);
}

PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const TestFunctionK& k)
{
    const StepGrid grid(model, cfg, k);
    return simulate_path(model, x0, frame0, cfg, grid);
}

PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const StepGrid& grid)
{
    if (grid.n_steps() != cfg.n_steps || grid.step() != cfg.step())
        throw InputError("step grid does not match the path configuration");
    NormalStream stream(cfg.seed, cfg.path_index);
    return run_path(model, x0, frame0, cfg, grid, [&stream] { return stream.next(); });
}

PathRecord simulate_path_with_normals(const ManifoldModel& model, const Point& x0,
                                      const Frame& frame0, const PathConfig& cfg,
                                      const TestFunctionK& k, std::span<const double> normals)
{
    const StepGrid grid(model, cfg, k);
    return simulate_path_with_normals(model, x0, frame0, cfg, grid, normals);
}

PathRecord simulate_path_with_normals(const ManifoldModel& model, const Point& x0,
                                      const Frame& frame0, const PathConfig& cfg,
                                      const StepGrid& grid, std::span<const double> normals)
{
    if (grid.n_steps() != cfg.n_steps || grid.step() != cfg.step())
        throw InputError("step grid does not match the path configuration");
    const std::size_t needed = static_cast<std::size_t>(cfg.n_steps) * cfg.substeps * model.dimension();
    if (normals.size() < needed)
        throw InputError("simulate_path_with_normals: not enough normals for the configured path");
    std::size_t next = 0;
    return run_path(model, x0, frame0, cfg, grid, [&] { return normals[next++]; });
}

double wk_outer_integral(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const TestFunctionK& k, const Vec& v, const Vec& w)
{
    cfg.validate(model);
    const int d = model.dimension();
    const double h = cfg.step();
    const double sub_scale = std::sqrt(h / cfg.substeps);
    const Mat ric = ricci_z_matrix(model);
    const Mat propagate = symmetric_exp(ric, -0.5 * h);
    const Mat propagate_inv = symmetric_exp(ric, 0.5 * h);

    NormalStream stream(cfg.seed, cfg.path_index);
    Mat q = Mat::Identity(d, d), q_inv = Mat::Identity(d, d);
    Vec inner = Vec::Zero(d);
    Point p = x0;
    Frame frame = frame0;
    double total = 0.0;

    for (int n = 0; n < cfg.n_steps; ++n) {
        const double s = n * h;
        Vec db = Vec::Zero(d);
        for (int j = 0; j < cfg.substeps; ++j)
            for (int i = 0; i < d; ++i) db[i] += sub_scale * stream.next();

        total += k.derivative(s) * (q * inner).dot(db);

        const Vec a = k.value(s) * (q * v);
        const Vec b = q * w;
        inner += q_inv * (rm_apply(model, db, a, b) - (0.5 * h) * h3_tensor(model, a, b));

        const Vec drift = drift_frame_coords(model, p, frame);
        q = propagate * q;
        q_inv = q_inv * propagate_inv;
        auto [next_p, next_frame] = geodesic_step(model, p, frame, Vec(db + (0.5 * h) * drift));
        p = std::move(next_p);
        frame = std::move(next_frame);
    }
    return total;
}

QBoundCheck check_q_bound_pairs(const ManifoldModel& model, const Point& x0, const PathConfig& cfg)
{
    cfg.validate(model);
    PathConfig light = cfg;
    light.accumulate_hessian = false;
    light.track_q_bound = false;
    const TestFunctionK k(curvature_constants(model).K, cfg.horizon);
    const StepGrid grid(model, light, k);
    NormalStream stream(cfg.seed, cfg.path_index);
    QHistory history;
    history.reserve(cfg.n_steps + 1);
    run_path(model, x0, canonical_frame(model, x0), light, grid, [&stream] { return stream.next(); },
             &history);

    const double h = cfg.step();
    const double K = curvature_constants(model).K;
    QBoundCheck out;
    for (std::size_t t = 1; t < history.size(); ++t) {
        for (std::size_t s = 0; s < t; ++s) {
            const double bound = std::exp(0.5 * K * (t - s) * h) * (1.0 + 5.0 * h);
            const double ratio = operator_norm(history[t].first * history[s].second) / bound;
            ++out.pairs;
            out.worst_ratio = std::max(out.worst_ratio, ratio);
            if (ratio > 1.0) ++out.violations;
        }
    }
    return out;
}

}  // namespace hessmc
