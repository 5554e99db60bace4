#pragma once

#include "hessmc/functionals.hpp"
#include "hessmc/geometry.hpp"
#include "hessmc/pathsim.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hessmc {

/// Rejection fraction at or above which an estimate is flagged invalid.
inline constexpr double kMaxRejectedFraction = 1e-3;

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t rejected_paths = 0;
    std::uint64_t seed = 0;

    bool valid() const
    {
        return n_paths > 0 &&
               static_cast<double>(rejected_paths) < kMaxRejectedFraction * static_cast<double>(n_paths);
    }
};

/// Square matrix of estimates in frame coordinates, stored row-major.
struct MCMatrix {
    int dim = 0;
    std::vector<MCEstimate> entries;

    MCEstimate& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * dim + j)]; }
    const MCEstimate& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * dim + j)]; }
};

struct EstimatorOptions {
    int n_steps = 0;  ///< 0 picks default_n_steps(T)
    int threads = 0;  ///< 0 uses the OpenMP default
    bool serial = false;
};

/// A point together with the orthonormal frame the derivatives refer to.
struct EvaluationSite {
    Point point;
    Frame frame;
};

enum class DerivativeOrder { value, gradient, hessian };

struct SiteEstimate {
    MCEstimate value;
    std::vector<MCEstimate> gradient;
    MCMatrix hessian;
    /// Hess(P_T f)_ij / P_T f with a delta-method standard error.
    MCMatrix hessian_ratio;
};

/// One ensemble simulated from the first site and moved to the others by
/// the isometry between frames (or, with linear drift, the exact affine
/// image of the discrete walk). All sites therefore share their paths.
std::vector<SiteEstimate> estimate_at_sites(const ManifoldModel& model, const ScalarFunctional& f,
                                            std::span<const EvaluationSite> sites, double T,
                                            std::size_t n_paths, std::uint64_t seed,
                                            DerivativeOrder order, const EstimatorOptions& opts = {});

MCEstimate estimate_semigroup(const ManifoldModel& model, const ScalarFunctional& f, const Point& x,
                              double T, std::size_t n_paths, std::uint64_t seed,
                              const EstimatorOptions& opts = {});

/// Components in canonical_frame(model, x).
std::vector<MCEstimate> estimate_gradient(const ManifoldModel& model, const ScalarFunctional& f,
                                          const Point& x, double T, std::size_t n_paths,
                                          std::uint64_t seed, const EstimatorOptions& opts = {});

/// Entries in canonical_frame(model, x); exactly symmetric.
MCMatrix estimate_hessian(const ManifoldModel& model, const ScalarFunctional& f, const Point& x,
                          double T, std::size_t n_paths, std::uint64_t seed,
                          const EstimatorOptions& opts = {});

struct LadderRung {
    int n_steps = 0;
    /// Hessian entry (i, j) estimated with this step count.
    MCEstimate estimate;
    /// estimate(n) - estimate(2n) on common Brownian paths.
    MCEstimate step_difference;
};

struct WeakErrorLadder {
    std::vector<LadderRung> rungs;
    /// Least-squares slope of -log|step_difference| against log n_steps.
    double slope = 0.0;
};

/// Hessian estimator run at n_steps = 1, 2, 4, ..., 2^n_rungs on the same
/// Brownian paths. The last level only serves as partner of the one before.
WeakErrorLadder hessian_weak_error_ladder(const ManifoldModel& model, const ScalarFunctional& f,
                                          const Point& x, double T, std::size_t n_paths,
                                          std::uint64_t seed, int n_rungs, int entry_i = 0,
                                          int entry_j = 0, const EstimatorOptions& opts = {});

struct GibbsCheck {
    double lhs = 0.0;         ///< E(XY)
    double rhs = 0.0;         ///< E(X log(X / EX)) + EX log E e^Y
    double margin = 0.0;      ///< lhs - rhs; the inequality says <= 0
    double std_error = 0.0;   ///< grouped jackknife
};

/// Sample version of the entropy (Gibbs) inequality. Throws InputError on
/// mismatched sizes, fewer than 20 samples, X <= 0 or EX = 0.
GibbsCheck gibbs_check(std::span<const double> x, std::span<const double> y);

struct MartingaleCheck {
    std::vector<MCEstimate> exp_martingale;   ///< E e^{A_i}
    std::vector<MCEstimate> exp_bracket;      ///< E e^{2 [A_i]}
    /// max_i (E e^{A_i} - sqrt(E e^{2[A_i]})) / combined std error
    double worst_z = 0.0;
};

/// Exponential-martingale bound E e^M <= (E e^{2[M]})^{1/2} for M = A_i.
MartingaleCheck martingale_exponential_check(const ManifoldModel& model, const Point& x, double T,
                                             std::size_t n_paths, std::uint64_t seed,
                                             const EstimatorOptions& opts = {});

}  // namespace hessmc
