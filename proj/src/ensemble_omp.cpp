#include "hessmc/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace hessmc {

namespace {

struct BatchPartial {
    SampleMoments moments;
    std::size_t rejected = 0;
    std::exception_ptr error;
};

void run_batch(std::size_t n_paths, std::size_t n_observables, const PathSampler& sampler,
               std::span<const std::size_t> partners, std::size_t batch, BatchPartial& out)
{
    out.moments = SampleMoments(n_observables, partners);
    std::vector<double> values(n_observables);
    const std::size_t begin = batch * kEnsembleBatch;
    const std::size_t end = std::min(n_paths, begin + kEnsembleBatch);
    for (std::size_t path = begin; path < end; ++path) {
        bool keep = sampler(path, values);
        for (double v : values) keep = keep && std::isfinite(v);
        if (keep)
            out.moments.push(values);
        else
            ++out.rejected;
    }
}

}  // namespace

EnsembleResult run_ensemble_parallel(std::size_t n_paths, std::size_t n_observables,
                                     const PathSampler& sampler, int threads,
                                     std::span<const std::size_t> partners)
{
    const std::size_t n_batches = (n_paths + kEnsembleBatch - 1) / kEnsembleBatch;
    std::vector<BatchPartial> partials(n_batches);
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();

    const long long n_batches_ll = static_cast<long long>(n_batches);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (long long b = 0; b < n_batches_ll; ++b) {
        BatchPartial& part = partials[static_cast<std::size_t>(b)];
        try {
            run_batch(n_paths, n_observables, sampler, partners, static_cast<std::size_t>(b), part);
        } catch (...) {
            part.error = std::current_exception();
        }
    }
    for (const BatchPartial& part : partials)
        if (part.error) std::rethrow_exception(part.error);

    // Pairwise tree reduction in batch order.
    for (std::size_t stride = 1; stride < n_batches; stride *= 2) {
        for (std::size_t i = 0; i + stride < n_batches; i += 2 * stride) {
            partials[i].moments.merge(partials[i + stride].moments);
            partials[i].rejected += partials[i + stride].rejected;
        }
    }

    EnsembleResult out{SampleMoments(n_observables, partners), n_paths, 0};
    if (n_batches > 0) {
        out.moments = std::move(partials[0].moments);
        out.rejected = partials[0].rejected;
    }
    return out;
}

}  // namespace hessmc
