#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hessmc {

/// Streaming first and second moments of a row of observables, plus the
/// co-moment of every column with one partner column (column 0 unless
/// given), which ratio estimates need. push() is Welford's update, merge()
/// Chan's pairwise combination.
class SampleMoments {
public:
    explicit SampleMoments(std::size_t width = 0, std::span<const std::size_t> partners = {});

    void push(std::span<const double> row);
    void merge(const SampleMoments& other);

    std::size_t count() const { return count_; }
    std::size_t width() const { return mean_.size(); }
    double mean(std::size_t i) const { return mean_[i]; }
    double variance(std::size_t i) const;
    double std_error(std::size_t i) const;
    /// Sample covariance of column i with its partner column.
    double covariance_with_partner(std::size_t i) const;
    std::size_t partner(std::size_t i) const { return partner_[i]; }

private:
    std::size_t count_ = 0;
    std::vector<std::size_t> partner_;
    std::vector<double> mean_;
    std::vector<double> m2_;
    std::vector<double> cross_;
    std::vector<double> delta_;  // scratch for push()
};

/// Simulates path `path_index` and writes its observables into `out`.
/// Returning false rejects the path (it is counted, not averaged).
using PathSampler = std::function<bool(std::uint64_t path_index, std::span<double> out)>;

struct EnsembleResult {
    SampleMoments moments;
    std::size_t n_paths = 0;
    std::size_t rejected = 0;
};

/// Paths per work unit. Batches are reduced pairwise in index order, so the
/// result depends only on this constant, never on the worker count.
inline constexpr std::size_t kEnsembleBatch = 512;

/// Straight loop over paths with one running accumulator. Kept as the
/// reference the parallel kernel is tested against.
EnsembleResult run_ensemble_serial(std::size_t n_paths, std::size_t n_observables,
                                   const PathSampler& sampler,
                                   std::span<const std::size_t> partners = {});

/// OpenMP kernel over fixed-size batches with a deterministic tree reduction.
/// threads <= 0 uses the OpenMP default.
EnsembleResult run_ensemble_parallel(std::size_t n_paths, std::size_t n_observables,
                                     const PathSampler& sampler, int threads = 0,
                                     std::span<const std::size_t> partners = {});

}  // namespace hessmc
