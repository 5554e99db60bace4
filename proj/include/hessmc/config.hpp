#pragma once

#include "hessmc/functionals.hpp"
#include "hessmc/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hessmc {

/// Malformed or inconsistent experiment configuration. The message starts
/// with the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Suite {
    formula_gradient,
    formula_hessian,
    bound_sweep,
    harnack,
    eigen,
    scalar_inequalities,
    convergence,
};

std::string to_string(Suite suite);
Suite parse_suite(const std::string& name);
const std::vector<Suite>& all_suites();
std::string suite_summary(Suite suite);

/// One model with the functional and evaluation points resolved for it.
struct ModelCase {
    ManifoldModel model;
    ScalarFunctional function;
    std::vector<Point> points;
};

struct ExperimentConfig {
    Suite suite = Suite::scalar_inequalities;
    std::vector<ModelCase> cases;
    /// Semigroup horizons T for the formula and convergence suites, heat
    /// times t for bound-sweep; unused elsewhere.
    std::vector<double> times;
    std::size_t n_paths = 0;
    int n_steps = 0;  ///< 0 lets the estimator choose
    std::uint64_t seed = 1;
    std::string output = "out";

    // harnack
    int n_triples = 50;
    double time_min = 0.05;
    double time_max = 3.0;
    double point_radius = 2.0;
    int exponent_grid = 10;

    // eigen
    double support_fraction = 0.05;
    int polar_points = 21;
    int azimuth_points = 8;
    int constant_samples = 4000;

    // scalar-inequalities
    int grid = 100;
    double k_min = -5.0;
    double k_max = 5.0;
    double t_max = 10.0;
    int sign_points = 2001;
    double sign_range = 10.0;

    // convergence
    int rungs = 8;
    int entry_i = 0;
    int entry_j = 0;

    /// Compact dump of the parsed input with sorted keys; hashed into reports.
    std::string canonical;
};

/// Parses and validates a JSON document. Nothing is simulated here, but
/// every model, functional and point is constructed and checked.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a file; an unreadable file is a ConfigError too.
ExperimentConfig load_config(const std::filesystem::path& path);

/// "kind:dimension[:parameter]" where the parameter is the curvature for
/// sphere and hyperbolic and the drift coefficient for euclidean.
ManifoldModel parse_model_spec(const std::string& spec);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace hessmc
