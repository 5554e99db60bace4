#include "hessmc/test_function.hpp"

#include "hessmc/types.hpp"

#include <cmath>

namespace hessmc {

namespace {

// sinh(y) - y for y >= 0 without cancellation near 0.
double sinh_minus_identity(double y)
{
    if (y >= 1.0)
        return std::sinh(y) - y;
    const double y2 = y * y;
    double term = y * y2 / 6.0;
    double sum = 0.0;
    for (int n = 3; term > 1e-18 * sum || sum == 0.0; n += 2) {
        sum += term;
        term *= y2 / ((n + 1.0) * (n + 2.0));
        if (term == 0.0) break;
    }
    return sum;
}

// G / T as a function of y = |K| T (the function is even in K T).
double g_over_t(double y)
{
    if (y < 1e-6)
        return (1.0 - y * y / 30.0) / 3.0;
    if (y > 40.0) {
        const double e1 = std::exp(-y);
        return (1.0 - e1 * e1 - 2.0 * y * e1) / (y * (1.0 - e1) * (1.0 - e1));
    }
    const double half = std::sinh(0.5 * y);
    return sinh_minus_identity(y) / (2.0 * y * half * half);
}

}  // namespace

double x_over_one_minus_exp(double x)
{
    if (std::abs(x) < 1e-6)
        return 1.0 + x / 2.0 + x * x / 12.0;
    return x / -std::expm1(-x);
}

double damping_rate(double K, double t)
{
    return x_over_one_minus_exp(2.0 * K * t) / (2.0 * t);
}

double exp_integral(double K, double tau)
{
    const double x = K * tau;
    if (std::abs(x) < 1e-8)
        return tau * (1.0 - x / 2.0 + x * x / 6.0);
    return -std::expm1(-x) / K;
}

TestFunctionK::TestFunctionK(double K, double horizon)
    : K_(K), horizon_(horizon), normalizer_(exp_integral(K, horizon))
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InputError("test function horizon must be positive and finite");
    if (!std::isfinite(K))
        throw InputError("test function K must be finite");
}

double TestFunctionK::value(double s) const
{
    if (s >= horizon_) return 0.0;
    if (s <= 0.0) return 1.0;
    return std::exp(-K_ * s) * exp_integral(K_, horizon_ - s) / normalizer_;
}

double TestFunctionK::derivative(double s) const
{
    return -std::exp(-K_ * s) / normalizer_;
}

IntegralsHG integrals_h_g(double K, double T)
{
    if (!(T > 0.0) || !std::isfinite(T))
        throw InputError("integrals_h_g requires T > 0");
    const double x = K * T;
    IntegralsHG out;
    out.H = x_over_one_minus_exp(x) / T;
    out.G = T * g_over_t(std::abs(x));
    return out;
}

}  // namespace hessmc
