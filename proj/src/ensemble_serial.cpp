#include "hessmc/ensemble.hpp"

#include "hessmc/types.hpp"

#include <cmath>

namespace hessmc {

SampleMoments::SampleMoments(std::size_t width, std::span<const std::size_t> partners)
    : partner_(width, 0), mean_(width, 0.0), m2_(width, 0.0), cross_(width, 0.0), delta_(width, 0.0)
{
    if (!partners.empty()) {
        if (partners.size() != width) throw InputError("SampleMoments: one partner per column required");
        for (std::size_t i = 0; i < width; ++i) {
            if (partners[i] >= width) throw InputError("SampleMoments: partner column out of range");
            partner_[i] = partners[i];
        }
    }
}

void SampleMoments::push(std::span<const double> row)
{
    ++count_;
    const double n = static_cast<double>(count_);
    const std::size_t w = mean_.size();
    for (std::size_t i = 0; i < w; ++i) {
        delta_[i] = row[i] - mean_[i];
        mean_[i] += delta_[i] / n;
        m2_[i] += delta_[i] * (row[i] - mean_[i]);
    }
    for (std::size_t i = 0; i < w; ++i)
        cross_[i] += delta_[i] * (row[partner_[i]] - mean_[partner_[i]]);
}

void SampleMoments::merge(const SampleMoments& other)
{
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    const double weight = n_a * n_b / n;
    const std::size_t w = mean_.size();
    for (std::size_t i = 0; i < w; ++i) delta_[i] = other.mean_[i] - mean_[i];
    for (std::size_t i = 0; i < w; ++i) {
        mean_[i] += delta_[i] * (n_b / n);
        m2_[i] += other.m2_[i] + delta_[i] * delta_[i] * weight;
        cross_[i] += other.cross_[i] + delta_[i] * delta_[partner_[i]] * weight;
    }
    count_ += other.count_;
}

double SampleMoments::variance(std::size_t i) const
{
    return count_ > 1 ? m2_[i] / static_cast<double>(count_ - 1) : 0.0;
}

double SampleMoments::std_error(std::size_t i) const
{
    return count_ > 1 ? std::sqrt(variance(i) / static_cast<double>(count_)) : 0.0;
}

double SampleMoments::covariance_with_partner(std::size_t i) const
{
    return count_ > 1 ? cross_[i] / static_cast<double>(count_ - 1) : 0.0;
}

EnsembleResult run_ensemble_serial(std::size_t n_paths, std::size_t n_observables,
                                   const PathSampler& sampler, std::span<const std::size_t> partners)
{
    EnsembleResult out{SampleMoments(n_observables, partners), n_paths, 0};
    std::vector<double> values(n_observables);

    for (std::size_t path = 0; path < n_paths; ++path) {
        bool keep = sampler(path, values);
        for (double v : values) keep = keep && std::isfinite(v);
        if (keep)
            out.moments.push(values);
        else
            ++out.rejected;
    }
    return out;
}

}  // namespace hessmc
