#include "fbmloss/model.hpp"

#include "fbmloss/errors.hpp"

#include <cmath>
#include <string>

namespace fbm {

HurstParameter::HurstParameter(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw DomainError("Hurst parameter must lie in (0, 1), got " + std::to_string(value));
    }
}

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("grid horizon must be positive and finite");
    }
    if (steps == 0) {
        throw DomainError("grid needs at least one step");
    }
}

double TimeGrid::point(std::size_t i) const noexcept {
    if (i >= steps_) {
        return horizon_;
    }
    return horizon_ * (static_cast<double>(i) / static_cast<double>(steps_));
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = point(i);
    }
    return out;
}

void ProcessParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("horizon must be positive");
    }
    if (!std::isfinite(mu)) {
        throw DomainError("mu must be finite");
    }
}

SamplePath::SamplePath(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DomainError("path length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
    }
    if (values_[0] != 0.0) {
        throw DomainError("path must start at 0");
    }
}

SamplePath::SamplePath(Unchecked, TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DomainError("path length does not match grid size");
    }
}

SamplePath SamplePath::from_unanchored(TimeGrid grid, std::vector<double> values) {
    return SamplePath(Unchecked{}, grid, std::move(values));
}

SamplePath SamplePath::zeros(const TimeGrid& grid) {
    return SamplePath(grid, std::vector<double>(grid.size(), 0.0));
}

double fbm_covariance(double s, double t, HurstParameter h) {
    if (s < 0.0 || t < 0.0) {
        throw DomainError("fbm_covariance: times must be non-negative");
    }
    const double two_h = 2.0 * h.value();
    if (s == t) {
        return std::pow(t, two_h);
    }
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double increment_autocov(std::size_t lag, double step, HurstParameter h) {
    if (!(step > 0.0)) {
        throw DomainError("increment_autocov: step must be positive");
    }
    const double two_h = 2.0 * h.value();
    const double scale = std::pow(step, two_h);
    if (lag == 0) {
        return scale;
    }
    if (h.value() == 0.5) {
        return 0.0;
    }
    const double n = static_cast<double>(lag);
    return 0.5 * scale *
           (std::pow(n + 1.0, two_h) + std::pow(n - 1.0, two_h) - 2.0 * std::pow(n, two_h));
}

SamplePath rescale_path(const SamplePath& path, double c, HurstParameter h) {
    if (!(c > 0.0)) {
        throw DomainError("rescale_path: scale factor must be positive");
    }
    const double factor = std::pow(c, h.value());
    std::vector<double> values(path.values().begin(), path.values().end());
    for (double& v : values) {
        v *= factor;
    }
    return SamplePath(TimeGrid(path.grid().horizon() * c, path.grid().steps()), std::move(values));
}

SamplePath to_drift_diffusion(const SamplePath& path, const ProcessParams& params) {
    params.validate();
    const TimeGrid& grid = path.grid();
    std::vector<double> values(path.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = params.mu * grid.point(i) + params.sigma * path[i];
    }
    return SamplePath(grid, std::move(values));
}

SamplePath to_price_path(const SamplePath& path, double y0, double r, double mu, double sigma) {
    if (!(y0 > 0.0)) {
        throw DomainError("to_price_path: initial value must be positive");
    }
    if (!(sigma > 0.0)) {
        throw DomainError("to_price_path: sigma must be positive");
    }
    const TimeGrid& grid = path.grid();
    std::vector<double> prices(path.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        prices[i] = y0 * std::exp((r + mu) * grid.point(i) + sigma * path[i]);
    }
    // Prices start at y0, not 0, so they bypass the SamplePath anchor check.
    return SamplePath::from_unanchored(grid, std::move(prices));
}

} // namespace fbm
