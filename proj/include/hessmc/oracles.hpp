#pragma once

#include "hessmc/functionals.hpp"
#include "hessmc/geometry.hpp"

#include <functional>
#include <optional>

namespace hessmc {

enum class SolutionKind { euclidean_gaussian, ou_gaussian, sphere_eigen };

/// Closed-form semigroup P_T f for the model/functional pairs that have one.
/// Semigroup time T refers to the generator (1/2)(Delta + Z); the heat-flow
/// solution of d/dt u = (Delta + Z) u is u(t) = P_{2t} f. Derivatives are in
/// the coordinates of the given orthonormal frame.
class AnalyticSolution {
public:
    static AnalyticSolution euclidean_gaussian(int d, Vec center, double width, double amplitude);
    static AnalyticSolution ou_gaussian(int d, double drift_coefficient, Vec center, double width,
                                        double amplitude);
    /// phi(x) = offset + <a, x> on the sphere of the given radius; an
    /// eigenfunction of Delta with eigenvalue -d / r^2 up to the constant.
    static AnalyticSolution sphere_eigen(int d, Vec direction, double offset = 0.0, double radius = 1.0);

    SolutionKind kind() const { return kind_; }
    const ManifoldModel& model() const { return model_; }
    const ScalarFunctional& initial() const { return initial_; }
    /// lambda with Delta phi = -lambda phi (sphere_eigen only, 0 otherwise).
    double eigenvalue() const { return eigenvalue_; }

    double value(double T, const Point& x) const;
    Vec gradient(double T, const Point& x, const Frame& frame) const;
    Mat hessian(double T, const Point& x, const Frame& frame) const;

    double heat_value(double t, const Point& x) const { return value(2.0 * t, x); }
    Vec heat_gradient(double t, const Point& x, const Frame& frame) const { return gradient(2.0 * t, x, frame); }
    Mat heat_hessian(double t, const Point& x, const Frame& frame) const { return hessian(2.0 * t, x, frame); }

private:
    AnalyticSolution(SolutionKind kind, ManifoldModel model, ScalarFunctional initial);

    // Gaussian kernels: P_T f(x) = scale^{d/2} A exp(-|m x - c|^2 / (2 s2)).
    struct GaussianState {
        double mean_factor;  // m
        double spread;       // s2 = width^2 + variance(T)
    };
    GaussianState gaussian_state(double T) const;
    void check_time(double T) const;

    SolutionKind kind_;
    ManifoldModel model_;
    ScalarFunctional initial_;
    double eigenvalue_ = 0.0;
};

/// Oracle for (model, f) when one exists.
std::optional<AnalyticSolution> oracle_for(const ManifoldModel& model, const ScalarFunctional& f);

using PointFunction = std::function<double(const Point&)>;

/// Second covariant derivative by central differences along geodesics
/// through x: diagonal entries directly, off-diagonal ones by polarization.
/// Requires step in [1e-4, 1e-1].
Mat finite_difference_hessian(const ManifoldModel& model, const PointFunction& fn, const Point& x,
                              const Frame& frame, double step);

Mat finite_difference_hessian(const AnalyticSolution& solution, double T, const Point& x,
                              const Frame& frame, double step);

/// Central-difference gradient along geodesics, same step range.
Vec finite_difference_gradient(const ManifoldModel& model, const PointFunction& fn, const Point& x,
                               const Frame& frame, double step);

/// d/dt u - (Delta + Z) u at heat time t, every derivative taken by finite
/// differences of heat_value.
double pde_residual(const AnalyticSolution& solution, double t, const Point& x);

}  // namespace hessmc
