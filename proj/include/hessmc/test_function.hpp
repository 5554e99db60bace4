#pragma once

namespace hessmc {

/// Exponential interpolation weight
///
///     k(s) = int_s^T e^{-K r} dr / int_0^T e^{-K r} dr,
///
/// with k(0) = 1 and k(T) = 0 exactly. K is the Ricci lower-bound constant
/// (Ric_Z >= -K); any real K is accepted.
class TestFunctionK {
public:
    TestFunctionK(double K, double horizon);

    double value(double s) const;
    double derivative(double s) const;

    double K() const { return K_; }
    double horizon() const { return horizon_; }
    /// int_0^T e^{-K r} dr
    double normalizer() const { return normalizer_; }

private:
    double K_;
    double horizon_;
    double normalizer_;
};

/// int_0^tau e^{-K r} dr, stable as K -> 0.
double exp_integral(double K, double tau);

struct IntegralsHG {
    double H;  ///< int_0^T e^{Ks} kdot(s)^2 ds
    double G;  ///< int_0^T e^{Ks} k(s)^2 ds
};

/// Closed forms of H and G for the exponential test function. Throws
/// InputError for T <= 0.
IntegralsHG integrals_h_g(double K, double T);

/// x / (1 - e^{-x}), equal to 1 at x = 0.
double x_over_one_minus_exp(double x);

/// K / (1 - e^{-2Kt}) with its K -> 0 limit 1/(2t).
double damping_rate(double K, double t);

}  // namespace hessmc
