#pragma once

// Implementation of fbm::for_each_path; included from montecarlo.hpp.

#include "fbmloss/random.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace fbm {
namespace detail {

// Runs task(i) for i in [0, count) on `workers` threads, contiguous blocks per
// thread. If any task throws, the exception of the smallest failing index is
// rethrown (NumericError gets the index prepended).
void run_indexed(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

// values[i] <- mu t_i + sigma values[i]; a no-op for the standard process.
void apply_drift_diffusion(std::span<double> values, const TimeGrid& grid, const ProcessParams& params);

} // namespace detail

template <class Visitor>
void for_each_path(const ExperimentConfig& config, const RunOptions& options, Visitor&& visit) {
    config.params.validate();
    const TimeGrid grid(config.params.horizon, config.n);
    const auto sampler = make_sampler(config.method, config.params.hurst, grid, options.sampler);
    detail::run_indexed(config.reps, resolve_workers(options.workers), [&](std::size_t i) {
        thread_local std::vector<double> values;
        values.resize(grid.size());
        GaussianSource source(SeedSpec{config.seed, i});
        sampler->sample_into(values, source);
        detail::apply_drift_diffusion(values, grid, config.params);
        visit(i, std::span<const double>(values));
    });
}

} // namespace fbm
