#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbm {

/// Hurst exponent of a fractional Brownian motion, validated to lie in (0, 1).
///
/// Samplers accept the whole open interval. The analytic loss bounds are only
/// stated for H >= 1/2; `in_paper_scope()` tells callers which side they are on.
class HurstParameter {
public:
    explicit HurstParameter(double value);

    double value() const noexcept { return value_; }
    bool in_paper_scope() const noexcept { return value_ >= 0.5; }

    friend bool operator==(HurstParameter, HurstParameter) = default;

private:
    double value_;
};

/// Uniform grid 0 = t_0 < t_1 < ... < t_n = horizon.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_ + 1; }
    double spacing() const noexcept { return horizon_ / static_cast<double>(steps_); }

    // Endpoint is returned as `horizon` exactly, not as n * spacing.
    double point(std::size_t i) const noexcept;
    std::vector<double> points() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_;
    std::size_t steps_;
};

/// Y_t = mu t + sigma B^H_t observed up to `horizon`.
struct ProcessParams {
    HurstParameter hurst{0.5};
    double mu = 0.0;
    double sigma = 1.0;
    double horizon = 1.0;

    void validate() const;
    bool is_standard() const noexcept { return mu == 0.0 && sigma == 1.0; }
};

/// Values of one realisation on a grid. values[0] is 0 for every process path;
/// only geometric price paths (`from_unanchored`) start elsewhere.
class SamplePath {
public:
    SamplePath(TimeGrid grid, std::vector<double> values);

    // Zero path on `grid`.
    static SamplePath zeros(const TimeGrid& grid);

    // Path whose first value need not be 0 (geometric price paths).
    static SamplePath from_unanchored(TimeGrid grid, std::vector<double> values);

    bool anchored() const noexcept { return values_.front() == 0.0; }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    struct Unchecked {};
    SamplePath(Unchecked, TimeGrid grid, std::vector<double> values);

    TimeGrid grid_;
    std::vector<double> values_;
};

/// E[B_s B_t] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstParameter h);

/// Covariance of two fBm increments of length `step` that are `lag` steps
/// apart. Lag 0 gives the increment variance step^{2H}.
double increment_autocov(std::size_t lag, double step, HurstParameter h);

/// Self-similarity map: times scaled by c, values by c^H.
SamplePath rescale_path(const SamplePath& path, double c, HurstParameter h);

/// values[i] <- mu t_i + sigma values[i].
SamplePath to_drift_diffusion(const SamplePath& path, const ProcessParams& params);

/// values[i] <- y0 exp((r + mu) t_i + sigma values[i]).
SamplePath to_price_path(const SamplePath& path, double y0, double r, double mu, double sigma);

} // namespace fbm
