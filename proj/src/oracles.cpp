#include "hessmc/oracles.hpp"

#include <cmath>

namespace hessmc {

namespace {

void check_step(double step)
{
    if (!(step >= 1e-4 && step <= 1e-1)) throw InputError("finite-difference step must lie in [1e-4, 1e-1]");
}

Point moved(const ManifoldModel& model, const Point& x, const Frame& frame, const Vec& direction, double step)
{
    return geodesic_step(model, x, frame, Vec(step * direction)).first;
}

// f along the unit geodesic direction v: (f(+h) - 2 f(0) + f(-h)) / h^2.
double second_difference(const ManifoldModel& model, const PointFunction& fn, const Point& x,
                         const Frame& frame, const Vec& v, double step, double center)
{
    return (fn(moved(model, x, frame, v, step)) - 2.0 * center + fn(moved(model, x, frame, v, -step))) /
           (step * step);
}

}  // namespace

AnalyticSolution::AnalyticSolution(SolutionKind kind, ManifoldModel model, ScalarFunctional initial)
    : kind_(kind), model_(std::move(model)), initial_(std::move(initial))
{
}

AnalyticSolution AnalyticSolution::euclidean_gaussian(int d, Vec center, double width, double amplitude)
{
    if (center.size() != d) throw InputError("Gaussian center has the wrong dimension");
    return AnalyticSolution(SolutionKind::euclidean_gaussian, ManifoldModel::euclidean(d),
                            ScalarFunctional::gaussian_bump(std::move(center), width, amplitude));
}

AnalyticSolution AnalyticSolution::ou_gaussian(int d, double drift_coefficient, Vec center, double width,
                                               double amplitude)
{
    if (center.size() != d) throw InputError("Gaussian center has the wrong dimension");
    return AnalyticSolution(SolutionKind::ou_gaussian, ManifoldModel::euclidean(d, drift_coefficient),
                            ScalarFunctional::gaussian_bump(std::move(center), width, amplitude));
}

AnalyticSolution AnalyticSolution::sphere_eigen(int d, Vec direction, double offset, double radius)
{
    ManifoldModel model = ManifoldModel::sphere(d, radius);
    AnalyticSolution out(SolutionKind::sphere_eigen, model,
                         ScalarFunctional::sphere_linear(std::move(direction), offset));
    out.initial_.check_compatible(out.model_);
    out.eigenvalue_ = d / (radius * radius);
    return out;
}

void AnalyticSolution::check_time(double T) const
{
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("semigroup time must be >= 0");
}

AnalyticSolution::GaussianState AnalyticSolution::gaussian_state(double T) const
{
    const double w = initial_.width();
    const double c = model_.drift_coefficient();
    if (kind_ == SolutionKind::euclidean_gaussian || c == 0.0) return {1.0, w * w + T};
    // dX = -(c/2) X dt + dB: mean e^{-cT/2} x, variance (1 - e^{-cT}) / c.
    const double variance = -std::expm1(-c * T) / c;
    return {std::exp(-0.5 * c * T), w * w + variance};
}

double AnalyticSolution::value(double T, const Point& x) const
{
    check_time(T);
    if (kind_ == SolutionKind::sphere_eigen) {
        const double decay = std::exp(-0.5 * eigenvalue_ * T);
        return initial_.offset() + decay * initial_.direction().dot(x.coords);
    }
    const GaussianState g = gaussian_state(T);
    const double w2 = initial_.width() * initial_.width();
    const Vec r = g.mean_factor * x.coords - initial_.center();
    return initial_.amplitude() * std::pow(w2 / g.spread, 0.5 * model_.dimension()) *
           std::exp(-r.squaredNorm() / (2.0 * g.spread));
}

Vec AnalyticSolution::gradient(double T, const Point& x, const Frame& frame) const
{
    check_time(T);
    if (kind_ == SolutionKind::sphere_eigen) {
        const double decay = std::exp(-0.5 * eigenvalue_ * T);
        return decay * (frame.basis.transpose() * initial_.direction());
    }
    const GaussianState g = gaussian_state(T);
    const Vec r = g.mean_factor * x.coords - initial_.center();
    const Vec ambient = -value(T, x) * g.mean_factor / g.spread * r;
    return frame.basis.transpose() * ambient;
}

Mat AnalyticSolution::hessian(double T, const Point& x, const Frame& frame) const
{
    check_time(T);
    const int d = model_.dimension();
    if (kind_ == SolutionKind::sphere_eigen) {
        // Hess <a, x> = -<a, x> / r^2 g on the radius-r sphere.
        const double decay = std::exp(-0.5 * eigenvalue_ * T);
        const double r2 = model_.length_scale() * model_.length_scale();
        return Mat::Identity(d, d) * (-decay * initial_.direction().dot(x.coords) / r2);
    }
    const GaussianState g = gaussian_state(T);
    const Vec r = frame.basis.transpose() * (g.mean_factor * x.coords - initial_.center());
    const double m2 = g.mean_factor * g.mean_factor;
    return value(T, x) * m2 * (r * r.transpose() / (g.spread * g.spread) - Mat::Identity(d, d) / g.spread);
}

std::optional<AnalyticSolution> oracle_for(const ManifoldModel& model, const ScalarFunctional& f)
{
    if (model.synthetic_h3()) return std::nullopt;
    if (model.kind() == ManifoldKind::euclidean && f.kind() == FunctionalKind::gaussian_bump) {
        if (model.drift_coefficient() == 0.0)
            return AnalyticSolution::euclidean_gaussian(model.dimension(), f.center(), f.width(), f.amplitude());
        return AnalyticSolution::ou_gaussian(model.dimension(), model.drift_coefficient(), f.center(), f.width(),
                                             f.amplitude());
    }
    if (model.kind() == ManifoldKind::sphere && f.kind() == FunctionalKind::sphere_linear)
        return AnalyticSolution::sphere_eigen(model.dimension(), f.direction(), f.offset(), model.length_scale());
    return std::nullopt;
}

Mat finite_difference_hessian(const ManifoldModel& model, const PointFunction& fn, const Point& x,
                              const Frame& frame, double step)
{
    check_step(step);
    const int d = model.dimension();
    const double center = fn(x);
    Mat hess(d, d);
    for (int i = 0; i < d; ++i)
        hess(i, i) = second_difference(model, fn, x, frame, Vec::Unit(d, i), step, center);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const Vec plus = (Vec::Unit(d, i) + Vec::Unit(d, j)) / std::sqrt(2.0);
            const Vec minus = (Vec::Unit(d, i) - Vec::Unit(d, j)) / std::sqrt(2.0);
            const double entry = 0.5 * (second_difference(model, fn, x, frame, plus, step, center) -
                                        second_difference(model, fn, x, frame, minus, step, center));
            hess(i, j) = entry;
            hess(j, i) = entry;
        }
    }
    return hess;
}

Mat finite_difference_hessian(const AnalyticSolution& solution, double T, const Point& x,
                              const Frame& frame, double step)
{
    return finite_difference_hessian(
        solution.model(), [&](const Point& p) { return solution.value(T, p); }, x, frame, step);
}

Vec finite_difference_gradient(const ManifoldModel& model, const PointFunction& fn, const Point& x,
                               const Frame& frame, double step)
{
    check_step(step);
    const int d = model.dimension();
    Vec grad(d);
    for (int i = 0; i < d; ++i) {
        const Vec e = Vec::Unit(d, i);
        grad[i] = (fn(moved(model, x, frame, e, step)) - fn(moved(model, x, frame, e, -step))) / (2.0 * step);
    }
    return grad;
}

double pde_residual(const AnalyticSolution& solution, double t, const Point& x)
{
    if (!(t > 0.0)) throw InputError("pde_residual needs t > 0");
    const ManifoldModel& model = solution.model();
    const Frame frame = canonical_frame(model, x);
    const double dt = std::min(1e-4, 0.5 * t);
    const double time_derivative =
        (solution.heat_value(t + dt, x) - solution.heat_value(t - dt, x)) / (2.0 * dt);

    const PointFunction at_t = [&](const Point& p) { return solution.heat_value(t, p); };
    const double space_step = 1e-3;
    const double laplacian = finite_difference_hessian(model, at_t, x, frame, space_step).trace();
    const Vec grad = finite_difference_gradient(model, at_t, x, frame, space_step);
    const double drift_term = drift_frame_coords(model, x, frame).dot(grad);
    return time_derivative - (laplacian + drift_term);
}

}  // namespace hessmc
