#include "fbmloss/path_stats.hpp"

#include "fbmloss/errors.hpp"

#include <algorithm>

namespace fbm {

PathStatistics compute_stats(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("compute_stats: empty path");
    }
    PathStatistics st;
    double lo = values[0];
    double hi = values[0];
    double run_max = values[0];
    std::size_t run_arg = 0;
    double best = 0.0;
    std::size_t best_peak = 0;
    std::size_t best_trough = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double v = values[i];
        if (v > run_max) {
            run_max = v;
            run_arg = i;
        }
        const double drop = run_max - v;
        if (drop > best) {
            best = drop;
            best_peak = run_arg;
            best_trough = i;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    st.sup = hi;
    st.inf = lo;
    st.range = hi - lo;
    st.max_loss = best;
    st.peak_index = best_peak;
    st.trough_index = best_trough;
    return st;
}

double max_loss(std::span<const double> values) {
    double run_max = values.empty() ? 0.0 : values[0];
    double best = 0.0;
    for (const double v : values) {
        run_max = std::max(run_max, v);
        best = std::max(best, run_max - v);
    }
    return best;
}

PathStatistics compute_stats(const SamplePath& path) {
    if (!path.anchored()) {
        throw DomainError("compute_stats: path must start at 0");
    }
    PathStatistics st = compute_stats(path.values());
    st.peak_time = path.grid().point(st.peak_index);
    st.trough_time = path.grid().point(st.trough_index);
    return st;
}

LossSeries loss_series(const SamplePath& path) {
    if (!path.anchored()) {
        throw DomainError("loss_series: path must start at 0");
    }
    const auto values = path.values();
    LossSeries out{path.grid(), std::vector<double>(values.size())};
    double run_max = values[0];
    for (std::size_t i = 0; i < values.size(); ++i) {
        run_max = std::max(run_max, values[i]);
        out.x[i] = run_max - values[i];
    }
    return out;
}

} // namespace fbm
