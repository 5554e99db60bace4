#include "hessmc/geometry.hpp"

#include "hessmc/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hessmc {

namespace {

void require_frame_vector(const ManifoldModel& model, const Vec& v, const char* what)
{
    if (v.size() != model.dimension()) {
        std::ostringstream msg;
        msg << what << ": expected a length-" << model.dimension()
            << " frame-coordinate vector, got length " << v.size();
        throw InputError(msg.str());
    }
}

double metric_sign(const ManifoldModel& model, int index)
{
    return (model.kind() == ManifoldKind::hyperbolic && index == model.dimension()) ? -1.0 : 1.0;
}

// Projects w onto the tangent space at p.
Vec tangent_projection(const ManifoldModel& model, const Vec& p, const Vec& w)
{
    if (model.kind() == ManifoldKind::euclidean)
        return w;
    return w - (ambient_inner(model, w, p) / ambient_inner(model, p, p)) * p;
}

void gram_schmidt(const ManifoldModel& model, Mat& basis)
{
    for (int j = 0; j < basis.cols(); ++j) {
        Vec col = basis.col(j);
        for (int i = 0; i < j; ++i) {
            const Vec prev = basis.col(i);
            col -= ambient_inner(model, col, prev) * prev;
        }
        basis.col(j) = col / std::sqrt(ambient_inner(model, col, col));
    }
}

}  // namespace

std::string to_string(ManifoldKind kind)
{
    switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

ManifoldKind parse_manifold_kind(const std::string& name)
{
    if (name == "euclidean") return ManifoldKind::euclidean;
    if (name == "sphere") return ManifoldKind::sphere;
    if (name == "hyperbolic") return ManifoldKind::hyperbolic;
    throw InputError("unknown manifold kind '" + name + "' (expected euclidean, sphere or hyperbolic)");
}

ManifoldModel::ManifoldModel(ManifoldKind kind, int dimension, double curvature, double drift)
    : kind_(kind), dimension_(dimension), curvature_(curvature), drift_(drift),
      length_scale_(curvature == 0.0 ? 0.0 : 1.0 / std::sqrt(std::abs(curvature)))
{
}

ManifoldModel ManifoldModel::make(ManifoldKind kind, int dimension, double curvature,
                                  double drift_coefficient)
{
    if (!std::isfinite(curvature) || !std::isfinite(drift_coefficient))
        throw InputError("model parameters must be finite");
    if (dimension < 1 || dimension > kMaxDim)
        throw InputError("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
    switch (kind) {
    case ManifoldKind::euclidean:
        if (curvature != 0.0)
            throw InputError("euclidean model requires curvature 0");
        break;
    case ManifoldKind::sphere:
        if (dimension < 2) throw InputError("sphere requires dimension >= 2");
        if (!(curvature > 0.0)) throw InputError("sphere requires curvature > 0");
        if (drift_coefficient != 0.0) throw InputError("drift is only supported on euclidean models");
        break;
    case ManifoldKind::hyperbolic:
        if (dimension < 2) throw InputError("hyperbolic space requires dimension >= 2");
        if (!(curvature < 0.0)) throw InputError("hyperbolic space requires curvature < 0");
        if (drift_coefficient != 0.0) throw InputError("drift is only supported on euclidean models");
        break;
    }
    return ManifoldModel(kind, dimension, curvature, drift_coefficient);
}

ManifoldModel ManifoldModel::euclidean(int dimension, double drift_coefficient)
{
    return make(ManifoldKind::euclidean, dimension, 0.0, drift_coefficient);
}

ManifoldModel ManifoldModel::sphere(int dimension, double radius)
{
    if (!(radius > 0.0)) throw InputError("sphere radius must be positive");
    return make(ManifoldKind::sphere, dimension, 1.0 / (radius * radius), 0.0);
}

ManifoldModel ManifoldModel::hyperbolic(int dimension, double curvature)
{
    return make(ManifoldKind::hyperbolic, dimension, curvature, 0.0);
}

ManifoldModel ManifoldModel::with_synthetic_h3(double scale) const
{
    if (!(scale >= 0.0)) throw InputError("synthetic (H3) scale must be >= 0");
    ManifoldModel copy = *this;
    copy.synthetic_h3_ = scale;
    return copy;
}

std::string ManifoldModel::describe() const
{
    // Same shape as the command-line model spec, so it parses back.
    auto number = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out = to_string(kind_) + ":" + std::to_string(dimension_) + ":" +
                      number(kind_ == ManifoldKind::euclidean ? drift_ : curvature_);
    if (synthetic_h3_) out += "+h3=" + number(*synthetic_h3_);
    return out;
}

double ambient_inner(const ManifoldModel& model, const Vec& a, const Vec& b)
{
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i)
        sum += metric_sign(model, i) * a[i] * b[i];
    return sum;
}

Vec rm_apply(const ManifoldModel& model, const Vec& a, const Vec& b, const Vec& c)
{
    require_frame_vector(model, a, "rm_apply");
    require_frame_vector(model, b, "rm_apply");
    require_frame_vector(model, c, "rm_apply");
    const double kappa = model.curvature();
    return kappa * (b.dot(c) * a - a.dot(c) * b);
}

Mat ricci_z_matrix(const ManifoldModel& model)
{
    const int d = model.dimension();
    const double diag = model.kind() == ManifoldKind::euclidean
                            ? model.drift_coefficient()
                            : (d - 1) * model.curvature();
    return diag * Mat::Identity(d, d);
}

Vec h3_tensor(const ManifoldModel& model, const Vec& a, const Vec& b)
{
    require_frame_vector(model, a, "h3_tensor");
    require_frame_vector(model, b, "h3_tensor");
    Vec out = Vec::Zero(model.dimension());
    if (model.synthetic_h3())
        out[0] = *model.synthetic_h3() * a.dot(b);
    return out;
}

CurvatureConstants curvature_constants(const ManifoldModel& model)
{
    const int d = model.dimension();
    CurvatureConstants c;
    if (model.kind() == ManifoldKind::euclidean) {
        c.K = -model.drift_coefficient();
        c.K1 = 0.0;
    } else {
        c.K = -(d - 1) * model.curvature();
        c.K1 = std::abs(model.curvature()) * std::sqrt(static_cast<double>(d - 1));
    }
    c.K2 = model.synthetic_h3().value_or(0.0);
    return c;
}

CurvatureConstants brute_force_constants(const ManifoldModel& model, int n_samples,
                                         std::uint64_t seed)
{
    if (n_samples < 1000)
        throw InputError("brute_force_constants needs n_samples >= 1000");
    const int d = model.dimension();

    // Ric_Z(e_a, e_b) = sum_i <Rm(e_i, e_a) e_b, e_i> - (grad Z^flat)_(ab)
    Mat ric = Mat::Zero(d, d);
    const Mat eye = Mat::Identity(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int i = 0; i < d; ++i)
                ric(a, b) += rm_apply(model, eye.col(i), eye.col(a), eye.col(b))[i];

    if (model.kind() == ManifoldKind::euclidean) {
        const Point p = base_point(model);
        const Frame f = canonical_frame(model, p);
        const double eps = 1e-4;
        Mat jac(d, d);
        for (int a = 0; a < d; ++a) {
            Point plus = p, minus = p;
            plus.coords += eps * f.basis.col(a);
            minus.coords -= eps * f.basis.col(a);
            jac.col(a) = (drift_frame_coords(model, plus, f) - drift_frame_coords(model, minus, f)) / (2 * eps);
        }
        ric -= 0.5 * (jac + jac.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(ric);

    CurvatureConstants out;
    out.K = -eig.eigenvalues().minCoeff();

    auto unit_sample = [d](NormalStream& stream) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = stream.next();
        return Vec(v / v.norm());
    };
    auto r_norm = [&](const Vec& x, const Vec& y) {
        double sum = 0.0;
        for (int i = 0; i < d; ++i) {
            const Vec r = rm_apply(model, eye.col(i), x, y);
            sum += r.squaredNorm();
        }
        return std::sqrt(sum);
    };

    for (int k = 0; k < n_samples; ++k) {
        NormalStream stream(seed, static_cast<std::uint64_t>(k));
        const Vec x = unit_sample(stream);
        const Vec y = unit_sample(stream);
        for (const Vec* second : {&y, &x}) {
            out.K1 = std::max(out.K1, r_norm(x, *second));
            out.K2 = std::max(out.K2, h3_tensor(model, x, *second).norm());
        }
    }
    return out;
}

Vec drift_frame_coords(const ManifoldModel& model, const Point& p, const Frame& frame)
{
    const int d = model.dimension();
    if (model.drift_coefficient() == 0.0)
        return Vec::Zero(d);
    const Vec z = -model.drift_coefficient() * p.coords;
    return frame.basis.transpose() * z;
}

std::pair<Point, Frame> geodesic_step(const ManifoldModel& model, const Point& p,
                                      const Frame& frame, const Vec& dv)
{
    require_frame_vector(model, dv, "geodesic_step");
    std::pair<Point, Frame> out{p, frame};
    geodesic_step_inplace(model, out.first, out.second, dv);
    return out;
}

void geodesic_step_inplace(const ManifoldModel& model, Point& p, Frame& frame, const Vec& dv)
{
    const int d = model.dimension();
    if (model.kind() == ManifoldKind::euclidean) {
        p.coords.noalias() += frame.basis * dv;
        return;
    }

    const int n = d + 1;
    const double last_sign = model.kind() == ManifoldKind::hyperbolic ? -1.0 : 1.0;
    auto inner = [&](const double* a, const double* b) {
        double sum = 0.0;
        for (int i = 0; i < d; ++i) sum += a[i] * b[i];
        return sum + last_sign * a[d] * b[d];
    };

    double* x = p.coords.data();
    double* basis = frame.basis.data();  // column-major, leading dimension n
    double v[kMaxAmbient];
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < d; ++j) sum += basis[j * n + i] * dv[j];
        v[i] = sum;
    }
    const double len2 = inner(v, v);
    if (!(len2 > 0.0)) return;

    const double len = std::sqrt(len2);
    const double radius = model.length_scale();
    const double angle = len / radius;
    double c, s, shift_p;
    if (last_sign > 0.0) {
        c = std::cos(angle);
        s = std::sin(angle);
        shift_p = -s / radius;
    } else {
        c = std::cosh(angle);
        s = std::sinh(angle);
        shift_p = s / radius;
    }
    double u[kMaxAmbient], shift[kMaxAmbient];
    for (int i = 0; i < n; ++i) {
        u[i] = v[i] / len;
        shift[i] = (c - 1.0) * u[i] + shift_p * x[i];
    }
    for (int j = 0; j < d; ++j) {
        double* col = basis + j * n;
        const double along = inner(col, u);
        for (int i = 0; i < n; ++i) col[i] += along * shift[i];
    }
    for (int i = 0; i < n; ++i) x[i] = c * x[i] + (radius * s) * u[i];

    // Back onto the constraint surface, then re-orthonormalize the frame.
    if (last_sign < 0.0 && x[d] < 0.0)
        for (int i = 0; i < n; ++i) x[i] = -x[i];
    const double xx = inner(x, x);
    const double scale = radius / std::sqrt(std::abs(xx));
    for (int i = 0; i < n; ++i) x[i] *= scale;
    const double x_norm2 = xx * scale * scale;
    for (int j = 0; j < d; ++j) {
        double* col = basis + j * n;
        const double coef = inner(col, x) / x_norm2;
        for (int i = 0; i < n; ++i) col[i] -= coef * x[i];
        for (int k = 0; k < j; ++k) {
            const double* prev = basis + k * n;
            const double proj = inner(col, prev);
            for (int i = 0; i < n; ++i) col[i] -= proj * prev[i];
        }
        const double norm = std::sqrt(inner(col, col));
        for (int i = 0; i < n; ++i) col[i] /= norm;
    }
}

void renormalize(const ManifoldModel& model, Point& p, Frame& frame)
{
    switch (model.kind()) {
    case ManifoldKind::euclidean:
        return;
    case ManifoldKind::sphere:
        p.coords *= model.length_scale() / p.coords.norm();
        break;
    case ManifoldKind::hyperbolic: {
        const int t = model.dimension();
        if (p.coords[t] < 0.0) p.coords = -p.coords;
        p.coords *= model.length_scale() / std::sqrt(-ambient_inner(model, p.coords, p.coords));
        break;
    }
    }
    for (int j = 0; j < frame.basis.cols(); ++j)
        frame.basis.col(j) = tangent_projection(model, p.coords, frame.basis.col(j));
    gram_schmidt(model, frame.basis);
}

Point base_point(const ManifoldModel& model)
{
    Point p{Vec::Zero(model.ambient_dimension())};
    if (model.kind() != ManifoldKind::euclidean)
        p.coords[model.dimension()] = model.length_scale();
    return p;
}

Frame canonical_frame(const ManifoldModel& model, const Point& p)
{
    const int d = model.dimension();
    const int n = model.ambient_dimension();
    Frame f{Mat::Zero(n, d)};
    if (model.kind() == ManifoldKind::euclidean) {
        f.basis = Mat::Identity(d, d);
        return f;
    }
    // Sphere: drop the coordinate axis most aligned with p. Hyperboloid: the
    // spatial axes always project to independent tangent vectors.
    Eigen::Index skip = d;
    if (model.kind() == ManifoldKind::sphere)
        p.coords.cwiseAbs().maxCoeff(&skip);
    int col = 0;
    for (int i = 0; i < n && col < d; ++i) {
        if (i == skip) continue;
        f.basis.col(col++) = tangent_projection(model, p.coords, Vec::Unit(n, i));
    }
    gram_schmidt(model, f.basis);
    return f;
}

Point point_at(const ManifoldModel& model, double distance, double angle)
{
    const Point base = base_point(model);
    const Frame frame = canonical_frame(model, base);
    const int d = model.dimension();
    Vec dv = Vec::Zero(d);
    dv[0] = distance * std::cos(angle);
    if (d > 1) dv[1] = distance * std::sin(angle);
    return geodesic_step(model, base, frame, dv).first;
}

bool on_manifold(const ManifoldModel& model, const Point& p, double tol)
{
    if (p.coords.size() != model.ambient_dimension() || !p.coords.allFinite())
        return false;
    switch (model.kind()) {
    case ManifoldKind::euclidean:
        return true;
    case ManifoldKind::sphere:
        return std::abs(p.coords.norm() - model.length_scale()) <= tol;
    case ManifoldKind::hyperbolic:
        return p.coords[model.dimension()] > 0.0 &&
               std::abs(ambient_inner(model, p.coords, p.coords) + 1.0 / std::abs(model.curvature())) <= tol;
    }
    return false;
}

bool frame_is_orthonormal(const ManifoldModel& model, const Point& p, const Frame& frame, double tol)
{
    const int d = model.dimension();
    if (frame.basis.rows() != model.ambient_dimension() || frame.basis.cols() != d)
        return false;
    for (int i = 0; i < d; ++i) {
        if (model.kind() != ManifoldKind::euclidean &&
            std::abs(ambient_inner(model, frame.basis.col(i), p.coords)) > tol)
            return false;
        for (int j = 0; j < d; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(ambient_inner(model, frame.basis.col(i), frame.basis.col(j)) - expected) > tol)
                return false;
        }
    }
    return true;
}

AffineMap frame_isometry(const ManifoldModel& model, const Point& from, const Frame& from_frame,
                         const Point& to, const Frame& to_frame)
{
    const int d = model.dimension();
    AffineMap map;
    if (model.kind() == ManifoldKind::euclidean) {
        map.linear = to_frame.basis * from_frame.basis.transpose();
        map.offset = to.coords - map.linear * from.coords;
        return map;
    }
    const int n = d + 1;
    auto completed = [&](const Point& p, const Frame& f) {
        Mat e(n, n);
        e.leftCols(d) = f.basis;
        e.col(d) = p.coords / model.length_scale();
        return e;
    };
    const Mat e_from = completed(from, from_frame);
    const Mat e_to = completed(to, to_frame);
    if (model.kind() == ManifoldKind::sphere) {
        map.linear = e_to * e_from.transpose();
    } else {
        Mat eta = Mat::Identity(n, n);
        eta(d, d) = -1.0;
        map.linear = e_to * eta * e_from.transpose() * eta;
    }
    map.offset = Vec::Zero(n);
    return map;
}

}  // namespace hessmc
