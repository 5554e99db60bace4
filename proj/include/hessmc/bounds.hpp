#pragma once

#include <cstddef>
#include <span>

namespace hessmc {

// Every evaluator takes (t, A, u) with t > 0 and 0 < u <= A and throws
// InputError outside that domain. L below stands for log(A / u).

/// (2K + 1/t) L; requires K >= 0.
double hamilton_gradient_bound(double K, double t, double A, double u);

/// 2K / (1 - e^{-2Kt}) L for any real K (limit L / t at K = 0).
double li_gradient_bound(double K, double t, double A, double u);

/// Composed Hessian bound on Hess(u)_ij / u.
double hessian_bound_main(double K, double K1, double K2, double t, double A, double u);

enum class GChoice {
    exact,       ///< G from the closed form for the exponential k
    one_third,   ///< G replaced by its upper bound T / 3
};

/// The same bound assembled from H and G of the exponential test function at
/// horizon T = 2t. With GChoice::one_third it reproduces hessian_bound_main.
double hessian_bound_raw(double K, double K1, double K2, double t, double A, double u, GChoice g);

/// Constant B of the clean bound.
double clean_constant_b(double K, double K1, double K2);

/// (sqrt 6 + 2)(B + 1/t)(1 + L).
double hessian_bound_clean(double K, double K1, double K2, double t, double A, double u);

struct HarnackExponents {
    double gamma = 0.0;
    double eta = 0.0;
    double gamma_tilde = 0.0;  ///< closed-form upper estimate of gamma
    double eta_tilde = 0.0;    ///< closed-form lower estimate of eta
};

/// Exponents of u(t,x) <= e^gamma A^{1-eta} u(s,x)^eta for 0 < s < t, by
/// adaptive Gauss-Kronrod quadrature, together with their closed-form estimates.
HarnackExponents harnack_exponents(double K, double K1, double K2, int d, double s, double t);

/// Prefactor shared by the pointwise and uniform eigenfunction bounds.
double eigenfunction_prefactor(double lambda, double lambda1, double K, double K1, double K2);

/// Bound on Hess(phi)_ij / phi at a point with 0 < phi_x <= phi_sup.
double eigenfunction_bound(double lambda, double lambda1, double K, double K1, double K2,
                           double phi_x, double phi_sup);

/// Bound on sup |Hess phi|.
double eigenfunction_uniform_bound(double lambda, double lambda1, double K, double K1, double K2,
                                   double phi_sup);

/// (3 - x) e^{2x} - 3 - 4x e^x - x
double appendix_g(double x);

struct SignCheck {
    std::size_t points = 0;
    std::size_t violations = 0;
    /// Most violating value of the scaled G(x) e^{-2|x|}, signed so that
    /// positive means violation (0 when every point has the right sign).
    double worst = 0.0;
};

/// G(x) <= 0 for x >= 0 and G(x) >= 0 for x <= 0, on G(x) e^{-2|x|} with
/// tolerance 1e-12.
SignCheck appendix_g_sign_check(std::span<const double> grid);

/// 1/(2t) + K^+ - K/(1 - e^{-2Kt}); nonnegative for t > 0.
double ek_inequality_margin(double K, double t);

}  // namespace hessmc
