#pragma once

#include "hessmc/geometry.hpp"

#include <cmath>
#include <string>

namespace hessmc {

enum class FunctionalKind { gaussian_bump, sphere_linear, constant };

std::string to_string(FunctionalKind kind);

/// Bounded test functions f with a closed-form supremum.
///
///   gaussian_bump:  amplitude * exp(-|x - center|^2 / (2 width^2)), the norm
///                   taken in ambient coordinates; center must lie on M.
///   sphere_linear:  offset + <direction, x> on the sphere.
///   constant:       c
class ScalarFunctional {
public:
    static ScalarFunctional gaussian_bump(Vec center, double width, double amplitude);
    static ScalarFunctional sphere_linear(Vec direction, double offset = 0.0);
    static ScalarFunctional constant(double c);

    FunctionalKind kind() const { return kind_; }
    const Vec& center() const { return vector_; }
    const Vec& direction() const { return vector_; }
    double width() const { return width_; }
    double amplitude() const { return amplitude_; }
    double offset() const { return offset_; }

    double operator()(const Vec& x) const
    {
        switch (kind_) {
        case FunctionalKind::gaussian_bump:
            return amplitude_ * std::exp(-(x - vector_).squaredNorm() * inv_two_width_sq_);
        case FunctionalKind::sphere_linear:
            return offset_ + vector_.dot(x);
        case FunctionalKind::constant:
            return amplitude_;
        }
        return 0.0;
    }

    double operator()(const Point& p) const { return (*this)(p.coords); }

    /// sup over M; throws InputError if the functional does not fit the model.
    double supremum(const ManifoldModel& model) const;

    /// Strictly positive on all of M.
    bool positive_on(const ManifoldModel& model) const;

    /// Throws InputError when the functional is not defined on the model.
    void check_compatible(const ManifoldModel& model) const;

private:
    FunctionalKind kind_ = FunctionalKind::constant;
    Vec vector_;
    double width_ = 1.0;
    double amplitude_ = 0.0;
    double offset_ = 0.0;
    double inv_two_width_sq_ = 0.5;
};

}  // namespace hessmc
