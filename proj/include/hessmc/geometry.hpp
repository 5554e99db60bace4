#pragma once

#include "hessmc/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace hessmc {

enum class ManifoldKind { euclidean, sphere, hyperbolic };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(const std::string& name);

/// Constant-curvature model space, or flat space with the linear drift
/// Z(x) = -c_Z x (an Ornstein-Uhlenbeck generator).
///
/// Sphere and hyperbolic points live in an embedding: the radius-r sphere in
/// R^{d+1}, and the upper sheet of <x,x>_M = -1/|kappa| in Minkowski space
/// R^{d,1} (last coordinate timelike).
class ManifoldModel {
public:
    static ManifoldModel euclidean(int dimension, double drift_coefficient = 0.0);
    static ManifoldModel sphere(int dimension, double radius = 1.0);
    static ManifoldModel hyperbolic(int dimension, double curvature = -1.0);

    /// Validating constructor for parsed input.
    static ManifoldModel make(ManifoldKind kind, int dimension, double curvature,
                              double drift_coefficient);

    /// Injects the constant tensor tau(a, b) = scale * <a, b> * e_1 as the
    /// (H3) tensor. No built-in geometry produces one; this only exists so the
    /// drift part of W^k can be exercised.
    ManifoldModel with_synthetic_h3(double scale) const;

    ManifoldKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    int ambient_dimension() const { return kind_ == ManifoldKind::euclidean ? dimension_ : dimension_ + 1; }
    double curvature() const { return curvature_; }
    double drift_coefficient() const { return drift_; }
    const std::optional<double>& synthetic_h3() const { return synthetic_h3_; }

    /// 1/sqrt|kappa| for curved kinds, 0 for euclidean.
    double length_scale() const { return length_scale_; }

    /// True when Rm and the (H3) tensor both vanish, so W^k is identically 0.
    bool curvature_free() const { return kind_ == ManifoldKind::euclidean && !synthetic_h3_; }

    std::string describe() const;

private:
    ManifoldModel(ManifoldKind kind, int dimension, double curvature, double drift);

    ManifoldKind kind_;
    int dimension_;
    double curvature_;
    double drift_;
    double length_scale_;
    std::optional<double> synthetic_h3_;
};

struct Point {
    Vec coords;
};

/// d tangent vectors at a point, as the columns of an (ambient x d) matrix.
struct Frame {
    Mat basis;
};

struct CurvatureConstants {
    double K = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
};

/// Ambient bilinear form: Euclidean, or Minkowski for the hyperboloid.
double ambient_inner(const ManifoldModel& model, const Vec& a, const Vec& b);

/// Rm(a, b)c in frame coordinates, kappa (<b,c> a - <a,c> b).
Vec rm_apply(const ManifoldModel& model, const Vec& a, const Vec& b, const Vec& c);

/// Ric_Z = Ric - grad Z^flat in frame coordinates.
Mat ricci_z_matrix(const ManifoldModel& model);

/// (grad Ric_Z^sharp + d*R - R(Z))(a, b) in frame coordinates.
Vec h3_tensor(const ManifoldModel& model, const Vec& a, const Vec& b);

/// Closed-form constants of condition (H).
CurvatureConstants curvature_constants(const ManifoldModel& model);

/// Independent estimate of (K, K1, K2): K from the trace of rm_apply plus a
/// finite-difference drift Jacobian, K1 and K2 by maximizing over sampled
/// unit pairs (each sample also contributes its diagonal pair (X, X)).
CurvatureConstants brute_force_constants(const ManifoldModel& model, int n_samples,
                                         std::uint64_t seed = 0x5eedULL);

/// Drift Z at p, expressed in the frame.
Vec drift_frame_coords(const ManifoldModel& model, const Point& p, const Frame& frame);

/// Moves along the geodesic exp_p(frame * dv) and parallel-transports the frame.
std::pair<Point, Frame> geodesic_step(const ManifoldModel& model, const Point& p,
                                      const Frame& frame, const Vec& dv);

/// geodesic_step without the copies, followed by renormalize. Used in the
/// path loop; dv must already have length d.
void geodesic_step_inplace(const ManifoldModel& model, Point& p, Frame& frame, const Vec& dv);

/// Pulls p back onto the manifold and re-orthonormalizes the frame.
void renormalize(const ManifoldModel& model, Point& p, Frame& frame);

/// Origin (euclidean), north pole (sphere) or apex of the hyperboloid.
Point base_point(const ManifoldModel& model);

/// Deterministic orthonormal frame at p.
Frame canonical_frame(const ManifoldModel& model, const Point& p);

/// Point at geodesic distance `distance` from the base point in direction
/// e_1 * cos(angle) + e_2 * sin(angle) of the base frame (angle ignored for d = 1).
Point point_at(const ManifoldModel& model, double distance, double angle = 0.0);

bool on_manifold(const ManifoldModel& model, const Point& p, double tol);
bool frame_is_orthonormal(const ManifoldModel& model, const Point& p, const Frame& frame,
                          double tol);

/// Affine map y -> linear * y + offset on ambient coordinates.
struct AffineMap {
    Mat linear;
    Vec offset;

    Vec apply(const Vec& y) const { return linear * y + offset; }
};

/// The isometry taking (from, from_frame) to (to, to_frame).
AffineMap frame_isometry(const ManifoldModel& model, const Point& from, const Frame& from_frame,
                         const Point& to, const Frame& to_frame);

}  // namespace hessmc
