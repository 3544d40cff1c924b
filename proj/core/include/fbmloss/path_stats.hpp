#pragma once

#include "fbmloss/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fbm {

/// Extremes of one path. `peak_index <= trough_index` locate the maximum loss;
/// among pairs attaining it the lexicographically earliest is reported.
struct PathStatistics {
    double sup = 0.0;
    double inf = 0.0;
    double range = 0.0;
    double max_loss = 0.0;
    double peak_time = 0.0;
    double trough_time = 0.0;
    std::size_t peak_index = 0;
    std::size_t trough_index = 0;
};

/// Running drawdown x[i] = max_{j <= i} values[j] - values[i].
struct LossSeries {
    TimeGrid grid;
    std::vector<double> x;
};

PathStatistics compute_stats(const SamplePath& path);
LossSeries loss_series(const SamplePath& path);

// Span versions for hot loops; no grid, so times are left at 0.
PathStatistics compute_stats(std::span<const double> values);
double max_loss(std::span<const double> values);

} // namespace fbm
