#include "hessmc/bounds.hpp"

#include "hessmc/test_function.hpp"
#include "hessmc/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace hessmc {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt3 = 1.73205080756887729353;
constexpr double kSqrt6 = 2.44948974278317809820;

double positive_part(double K) { return std::max(K, 0.0); }

double log_ratio(double t, double A, double u)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("time t must be positive and finite");
    if (!(u > 0.0) || !std::isfinite(u)) throw InputError("solution value u must be positive");
    if (!(A >= u) || !std::isfinite(A)) throw InputError("supremum A must satisfy A >= u");
    return std::log(A / u);
}

void check_constants(double K, double K1, double K2)
{
    if (!std::isfinite(K)) throw InputError("K must be finite");
    if (!(K1 >= 0.0) || !std::isfinite(K1)) throw InputError("K1 must be finite and >= 0");
    if (!(K2 >= 0.0) || !std::isfinite(K2)) throw InputError("K2 must be finite and >= 0");
}

// log((e^{2Kt} - 1) / (e^{2Ks} - 1)), with the limit log(t/s) at K = 0.
double log_growth_ratio(double K, double s, double t)
{
    if (K == 0.0) return std::log(t / s);
    if (K > 0.0) {
        // e^{2Kt} - 1 = e^{2Kt}(1 - e^{-2Kt}) keeps large arguments finite.
        return 2.0 * K * (t - s) + std::log(std::expm1(-2.0 * K * t) / std::expm1(-2.0 * K * s));
    }
    return std::log(std::expm1(2.0 * K * t) / std::expm1(2.0 * K * s));
}

template <class F>
double integrate(F&& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

}  // namespace

double hamilton_gradient_bound(double K, double t, double A, double u)
{
    if (!(K >= 0.0) || !std::isfinite(K)) throw InputError("Hamilton's bound requires K >= 0");
    return (2.0 * K + 1.0 / t) * log_ratio(t, A, u);
}

double li_gradient_bound(double K, double t, double A, double u)
{
    if (!std::isfinite(K)) throw InputError("K must be finite");
    const double L = log_ratio(t, A, u);
    return 2.0 * damping_rate(K, t) * L;
}

double hessian_bound_main(double K, double K1, double K2, double t, double A, double u)
{
    check_constants(K, K1, K2);
    const double L = log_ratio(t, A, u);
    const double rate = damping_rate(K, t);
    const double lead = std::sqrt(8.0 * rate / 3.0 * L);
    return lead * (0.5 * K2 * t + (std::sqrt(2.0 * t) * K1 + std::sqrt(12.0 * rate)) * (1.0 + std::sqrt(2.0 * L)));
}

double hessian_bound_raw(double K, double K1, double K2, double t, double A, double u, GChoice g)
{
    check_constants(K, K1, K2);
    const double L = log_ratio(t, A, u);
    const double T = 2.0 * t;
    const IntegralsHG hg = integrals_h_g(K, T);
    const double H = hg.H;
    const double G = g == GChoice::exact ? hg.G : T / 3.0;
    const double sqrt_term = 0.5 * K2 * std::sqrt(2.0 * G * T) + 2.0 * K1 * std::sqrt(2.0 * G) + 4.0 * std::sqrt(2.0 * H);
    const double linear_term = 4.0 * (K1 * std::sqrt(G) + 2.0 * std::sqrt(H));
    return std::sqrt(H) * (sqrt_term * std::sqrt(L) + linear_term * L);
}

double clean_constant_b(double K, double K1, double K2)
{
    check_constants(K, K1, K2);
    const double kp = positive_part(K);
    return (std::sqrt(6.0 * K2) - std::sqrt(3.0 * K2)) / 12.0 + kSqrt6 / 3.0 * K1 +
           2.0 * (std::max(kp, K2) + kp);
}

double hessian_bound_clean(double K, double K1, double K2, double t, double A, double u)
{
    const double L = log_ratio(t, A, u);
    return (kSqrt6 + 2.0) * (clean_constant_b(K, K1, K2) + 1.0 / t) * (1.0 + L);
}

HarnackExponents harnack_exponents(double K, double K1, double K2, int d, double s, double t)
{
    check_constants(K, K1, K2);
    if (d < 1) throw InputError("dimension must be >= 1");
    if (!(s > 0.0) || !std::isfinite(t)) throw InputError("Harnack times need 0 < s < t");
    if (!(t > s)) throw InputError("Harnack times need s < t");

    // sqrt(2Kr / (3(1 - e^{-2Kr}))) = sqrt(2r rate(r) / 3)
    auto shape = [K](double r) { return std::sqrt(2.0 * r * damping_rate(K, r) / 3.0); };
    const double gamma_integral = integrate(
        [&](double r) { return (K2 * std::sqrt(2.0 * r) / 4.0 + K1) * shape(r) + damping_rate(K, r); }, s, t);
    const double eta_integral =
        integrate([&](double r) { return K1 * shape(r) + damping_rate(K, r); }, s, t);

    HarnackExponents out;
    const double dd = static_cast<double>(d);
    out.gamma = 2.0 * dd * dd * gamma_integral * gamma_integral;
    out.eta = 0.5 * std::exp(-4.0 * dd * eta_integral);

    const double kp = positive_part(K);
    const double t32 = t * std::sqrt(t), s32 = s * std::sqrt(s);
    const double growth = log_growth_ratio(K, s, t);
    const double inner = kSqrt6 / 18.0 * (K2 + 4.0 * K1 * std::sqrt(kp)) * (t32 - s32) +
                         K2 * std::sqrt(3.0 * kp) / 12.0 * (t * t - s * s) + kSqrt3 / 3.0 * K1 * (t - s) +
                         0.5 * growth;
    out.gamma_tilde = 2.0 * dd * dd * inner * inner;
    const double log_eta = 4.0 * dd * kSqrt3 / 3.0 * K1 * (s - t) +
                           8.0 * dd * kSqrt6 / 9.0 * K1 * std::sqrt(kp) * (s32 - t32) - 2.0 * dd * growth;
    out.eta_tilde = 0.5 * std::exp(log_eta);
    return out;
}

double eigenfunction_prefactor(double lambda, double lambda1, double K, double K1, double K2)
{
    check_constants(K, K1, K2);
    if (!(lambda1 > 0.0) || !(lambda >= lambda1) || !std::isfinite(lambda))
        throw InputError("eigenvalues need lambda >= lambda1 > 0");
    const double kp = positive_part(K);
    const double curvature_part = K2 / 4.0 * std::sqrt(1.0 / (3.0 * lambda1) + kp / (3.0 * lambda1 * lambda1)) +
                                  2.0 * K1 * std::sqrt(1.0 / 3.0 + kp / (3.0 * lambda1));
    return (2.0 + kSqrt2) * (curvature_part + 2.0 * (lambda + kp));
}

double eigenfunction_bound(double lambda, double lambda1, double K, double K1, double K2,
                           double phi_x, double phi_sup)
{
    if (!(phi_x > 0.0)) throw InputError("eigenfunction bound needs phi(x) > 0");
    if (!(phi_sup >= phi_x) || !std::isfinite(phi_sup)) throw InputError("eigenfunction bound needs phi(x) <= sup phi");
    return eigenfunction_prefactor(lambda, lambda1, K, K1, K2) * (1.0 + std::log(phi_sup / phi_x));
}

double eigenfunction_uniform_bound(double lambda, double lambda1, double K, double K1, double K2,
                                   double phi_sup)
{
    if (!(phi_sup > 0.0) || !std::isfinite(phi_sup)) throw InputError("sup phi must be positive");
    return eigenfunction_prefactor(lambda, lambda1, K, K1, K2) * phi_sup;
}

double appendix_g(double x)
{
    return (3.0 - x) * std::exp(2.0 * x) - 3.0 - 4.0 * x * std::exp(x) - x;
}

SignCheck appendix_g_sign_check(std::span<const double> grid)
{
    constexpr double kTolerance = 1e-12;
    SignCheck out;
    for (double x : grid) {
        if (!std::isfinite(x)) throw InputError("appendix_g_sign_check: grid values must be finite");
        const double scaled = appendix_g(x) * std::exp(-2.0 * std::abs(x));
        // Positive excess means the wrong sign on that side of 0.
        const double excess = x >= 0.0 ? scaled : -scaled;
        ++out.points;
        if (excess > kTolerance) ++out.violations;
        out.worst = std::max(out.worst, excess);
    }
    return out;
}

double ek_inequality_margin(double K, double t)
{
    if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(K)) throw InputError("ek inequality needs t > 0");
    return 1.0 / (2.0 * t) + positive_part(K) - damping_rate(K, t);
}

}  // namespace hessmc
