#pragma once

// Hand-rolled generators for the property tests. Fixed seeds keep every
// run reproducible; each test draws its own stream.

#include "hessmc/geometry.hpp"
#include "hessmc/random.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace testgen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return hessmc::to_unit_interval(rng_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

    double normal()
    {
        return std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * std::numbers::pi * uniform());
    }

    hessmc::Vec normal_vec(int n)
    {
        hessmc::Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    hessmc::Vec unit_vec(int n)
    {
        hessmc::Vec v = normal_vec(n);
        return v / v.norm();
    }

    hessmc::ManifoldModel model()
    {
        switch (integer(0, 3)) {
        case 0: return hessmc::ManifoldModel::euclidean(integer(1, 4), 0.0);
        case 1: return hessmc::ManifoldModel::euclidean(integer(1, 4), uniform(0.1, 2.0));
        case 2: return hessmc::ManifoldModel::sphere(integer(2, 4), uniform(0.5, 2.0));
        default: return hessmc::ManifoldModel::hyperbolic(integer(2, 4), -uniform(0.25, 2.0));
        }
    }

    /// Point within geodesic distance `reach` of the base point.
    hessmc::Point point(const hessmc::ManifoldModel& m, double reach = 1.5)
    {
        return hessmc::point_at(m, uniform(0.0, reach), uniform(0.0, 2.0 * std::numbers::pi));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace testgen
