#pragma once

#include "hessmc/geometry.hpp"
#include "hessmc/test_function.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hessmc {

struct PathConfig {
    double horizon = 1.0;
    int n_steps = 100;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    /// Gaussian draws summed into each step's increment. Running the same
    /// path at n_steps * substeps = const gives coupled (common random
    /// number) discretizations of one Brownian path.
    int substeps = 1;
    /// When false only the endpoint, Q and the gradient weights are built.
    bool accumulate_hessian = true;
    /// Track max_t |Q_t| e^{-Kt/2}; costs one eigen-solve per step.
    bool track_q_bound = true;

    double step() const { return horizon / n_steps; }
    void validate(const ManifoldModel& model) const;
};

/// Default step count: h <= min(1e-2, T/100).
int default_n_steps(double horizon);

/// Everything one simulated path contributes to the estimators. All tangent
/// quantities are in coordinates of the transported frame.
struct PathRecord {
    Point endpoint;
    Frame end_frame;
    Mat q_matrix;
    Mat q_inverse;
    /// A_i = int kdot(s) <Q_s e_i, //_s dB_s>
    Vec grad_integrals;
    /// [A_i]_T = int kdot(s)^2 |Q_s e_i|^2 ds
    Vec quadratic_variation;
    /// C_ij = int A_i(s-) kdot(s) <Q_s e_j, //_s dB_s>
    Mat nested_integrals;
    /// D_ij = int kdot(s) <W^k_s(e_i, e_j), //_s dB_s>
    Mat wk_outer_integrals;
    /// max over steps of |Q_t| e^{-Kt/2} (NaN when not tracked)
    double q_bound_violation = 0.0;
    bool valid = true;
};

/// Per-step quantities shared by every path of one configuration: k and its
/// derivative at the left end of each step, and the one-step propagator of Q.
class StepGrid {
public:
    StepGrid(const ManifoldModel& model, const PathConfig& cfg, const TestFunctionK& k);

    int n_steps() const { return static_cast<int>(k_value_.size()); }
    double step() const { return step_; }
    double k_value(int n) const { return k_value_[static_cast<std::size_t>(n)]; }
    double k_derivative(int n) const { return k_derivative_[static_cast<std::size_t>(n)]; }
    double K() const { return K_; }
    const Mat& propagate() const { return propagate_; }
    const Mat& propagate_inverse() const { return propagate_inv_; }
    /// Ric_Z is a multiple of the identity, so Q stays scalar.
    bool isotropic() const { return isotropic_; }
    double scalar_propagate() const { return scalar_propagate_; }

private:
    double step_;
    double K_;
    std::vector<double> k_value_;
    std::vector<double> k_derivative_;
    Mat propagate_;
    Mat propagate_inv_;
    bool isotropic_ = false;
    double scalar_propagate_ = 1.0;
};

PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const PathConfig& cfg,
                         const TestFunctionK& k);

/// Hot-loop entry point: `grid` must have been built for (model, cfg, k).
PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const StepGrid& grid);

PathRecord simulate_path(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const TestFunctionK& k);

/// Same scheme driven by caller-supplied standard normals, laid out step by
/// step as n_steps * substeps * d values. cfg.seed / path_index are ignored.
PathRecord simulate_path_with_normals(const ManifoldModel& model, const Point& x0,
                                      const Frame& frame0, const PathConfig& cfg,
                                      const TestFunctionK& k, std::span<const double> normals);

PathRecord simulate_path_with_normals(const ManifoldModel& model, const Point& x0,
                                      const Frame& frame0, const PathConfig& cfg,
                                      const StepGrid& grid, std::span<const double> normals);

/// int kdot(s) <W^k_s(v, w), //_s dB_s> for one pair (v, w), carried as a
/// single vector recurrence instead of the d x d array of simulate_path.
double wk_outer_integral(const ManifoldModel& model, const Point& x0, const Frame& frame0,
                         const PathConfig& cfg, const TestFunctionK& k, const Vec& v, const Vec& w);

struct QBoundCheck {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< max |Q_t Q_s^{-1}| / (e^{K(t-s)/2}(1+5h))
};

/// Damped-transport growth bound |Q_t Q_s^{-1}| <= e^{K(t-s)/2}(1 + 5h) over
/// every pair of recorded times s < t on one path.
QBoundCheck check_q_bound_pairs(const ManifoldModel& model, const Point& x0, const PathConfig& cfg);

}  // namespace hessmc
