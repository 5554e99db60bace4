#include "hessmc/functionals.hpp"

#include <cmath>

namespace hessmc {

std::string to_string(FunctionalKind kind)
{
    switch (kind) {
    case FunctionalKind::gaussian_bump: return "gaussian_bump";
    case FunctionalKind::sphere_linear: return "sphere_linear";
    case FunctionalKind::constant: return "constant";
    }
    return "unknown";
}

ScalarFunctional ScalarFunctional::gaussian_bump(Vec center, double width, double amplitude)
{
    if (!(width > 0.0) || !std::isfinite(width)) throw InputError("gaussian_bump width must be positive");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw InputError("gaussian_bump amplitude must be positive");
    if (!center.allFinite()) throw InputError("gaussian_bump center must be finite");
    ScalarFunctional f;
    f.kind_ = FunctionalKind::gaussian_bump;
    f.vector_ = std::move(center);
    f.width_ = width;
    f.amplitude_ = amplitude;
    f.inv_two_width_sq_ = 1.0 / (2.0 * width * width);
    return f;
}

ScalarFunctional ScalarFunctional::sphere_linear(Vec direction, double offset)
{
    if (!direction.allFinite() || !std::isfinite(offset))
        throw InputError("sphere_linear parameters must be finite");
    ScalarFunctional f;
    f.kind_ = FunctionalKind::sphere_linear;
    f.vector_ = std::move(direction);
    f.offset_ = offset;
    return f;
}

ScalarFunctional ScalarFunctional::constant(double c)
{
    if (!std::isfinite(c)) throw InputError("constant functional must be finite");
    ScalarFunctional f;
    f.kind_ = FunctionalKind::constant;
    f.amplitude_ = c;
    return f;
}

void ScalarFunctional::check_compatible(const ManifoldModel& model) const
{
    switch (kind_) {
    case FunctionalKind::gaussian_bump:
        if (vector_.size() != model.ambient_dimension())
            throw InputError("gaussian_bump center has the wrong number of coordinates for " + model.describe());
        if (!on_manifold(model, Point{vector_}, 1e-8))
            throw InputError("gaussian_bump center must lie on the manifold");
        break;
    case FunctionalKind::sphere_linear:
        if (model.kind() != ManifoldKind::sphere)
            throw InputError("sphere_linear is only defined on sphere models");
        if (vector_.size() != model.ambient_dimension())
            throw InputError("sphere_linear direction has the wrong number of coordinates");
        break;
    case FunctionalKind::constant:
        break;
    }
}

double ScalarFunctional::supremum(const ManifoldModel& model) const
{
    check_compatible(model);
    switch (kind_) {
    case FunctionalKind::gaussian_bump: return amplitude_;
    case FunctionalKind::sphere_linear: return offset_ + vector_.norm() * model.length_scale();
    case FunctionalKind::constant: return amplitude_;
    }
    return 0.0;
}

bool ScalarFunctional::positive_on(const ManifoldModel& model) const
{
    check_compatible(model);
    switch (kind_) {
    case FunctionalKind::gaussian_bump: return true;
    case FunctionalKind::sphere_linear: return offset_ - vector_.norm() * model.length_scale() > 0.0;
    case FunctionalKind::constant: return amplitude_ > 0.0;
    }
    return false;
}

}  // namespace hessmc
