#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hessmc {

/// Largest supported intrinsic dimension. The W^k accumulators hold d^3
/// reals, which stays cheap for d <= 5.
inline constexpr int kMaxDim = 5;
inline constexpr int kMaxAmbient = kMaxDim + 1;

// Fixed-capacity Eigen types: no heap traffic inside the path loop.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient>;

/// Invalid arguments or domain violations (bad dimension, u > A, s >= t, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Monte Carlo estimator could not produce a usable statistic.
class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hessmc
