#pragma once

#include "fbmloss/model.hpp"
#include "fbmloss/random.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fbm {

enum class SamplerMethod { cholesky, hosking, circulant, truncated_ma };

std::string_view to_string(SamplerMethod method) noexcept;
// Throws ConfigError on an unknown name.
SamplerMethod parse_sampler_method(std::string_view name);

struct SamplerOptions {
    // Largest grid the O(n^3) Cholesky sampler will factor.
    std::size_t cholesky_cap = 4096;
    // Truncation point of the moving-average integral, in multiples of the
    // horizon. Must be at least 10.
    double burn_in_horizons = 50.0;
};

/// Draws standard fBm paths on a fixed grid.
///
/// Construction does all per-(H, grid) work (factorisation, recursion
/// coefficients, embedding spectrum). `sample_into` is const and safe to call
/// from several threads at once, each with its own GaussianSource.
class PathSampler {
public:
    virtual ~PathSampler() = default;

    virtual SamplerMethod method() const noexcept = 0;
    // Variates consumed per path.
    virtual std::size_t variates_per_path() const noexcept = 0;
    // Writes grid.size() values, values[0] = 0.
    virtual void sample_into(std::span<double> values, GaussianSource& source) const = 0;

    const TimeGrid& grid() const noexcept { return grid_; }
    HurstParameter hurst() const noexcept { return hurst_; }

    SamplePath sample(GaussianSource& source) const;

protected:
    PathSampler(HurstParameter h, const TimeGrid& grid) : hurst_(h), grid_(grid) {}

private:
    HurstParameter hurst_;
    TimeGrid grid_;
};

/// Exact: lower Cholesky factor of the n x n covariance of (B_{t_1}..B_{t_n}).
class CholeskySampler final : public PathSampler {
public:
    CholeskySampler(HurstParameter h, const TimeGrid& grid, std::size_t cap = 4096);

    SamplerMethod method() const noexcept override { return SamplerMethod::cholesky; }
    std::size_t variates_per_path() const noexcept override { return grid().steps(); }
    void sample_into(std::span<double> values, GaussianSource& source) const override;

private:
    std::vector<double> factor_; // packed lower triangle, row-major
};

/// Exact: Durbin-Levinson recursion on the increment autocovariance, then a
/// cumulative sum.
class HoskingSampler final : public PathSampler {
public:
    HoskingSampler(HurstParameter h, const TimeGrid& grid);

    SamplerMethod method() const noexcept override { return SamplerMethod::hosking; }
    std::size_t variates_per_path() const noexcept override { return grid().steps(); }
    void sample_into(std::span<double> values, GaussianSource& source) const override;

    // Row k holds the k prediction coefficients for increment k (row 0 empty).
    std::span<const double> coefficients(std::size_t k) const;
    std::span<const double> innovation_sd() const noexcept { return innovation_sd_; }

private:
    std::vector<double> phi_; // packed, row k at offset k(k-1)/2
    std::vector<double> innovation_sd_;
};

/// Exact: Davies-Harte circulant embedding of the increment covariance.
///
/// Embedding size m is the smallest power of two >= 2n. Each path consumes m
/// variates and one length-m FFT.
class CirculantSampler final : public PathSampler {
public:
    CirculantSampler(HurstParameter h, const TimeGrid& grid);
    ~CirculantSampler() override;

    SamplerMethod method() const noexcept override { return SamplerMethod::circulant; }
    std::size_t variates_per_path() const noexcept override { return embedding_size_; }
    void sample_into(std::span<double> values, GaussianSource& source) const override;

    std::size_t embedding_size() const noexcept { return embedding_size_; }
    // Embedding spectrum after clamping, length m.
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

    // Relative tolerance below which a negative eigenvalue is rounding noise.
    static constexpr double kEigenTolerance = 1e-10;

private:
    struct Plan;
    std::size_t embedding_size_;
    std::vector<double> eigenvalues_;
    std::vector<double> weights_; // sqrt(lambda_k / m) or sqrt(lambda_k / 2m)
    std::unique_ptr<Plan> plan_;
};

/// Approximate: midpoint Riemann sum of the Mandelbrot-van Ness moving-average
/// representation, truncated at -burn_in. The kernel constant is chosen so the
/// untruncated integral has Var(B_1) = 1; truncation still biases the variance
/// low (about 0.8% at H = 0.7). Only for cross-checking the exact samplers;
/// requires H >= 1/2.
class TruncatedMaSampler final : public PathSampler {
public:
    TruncatedMaSampler(HurstParameter h, const TimeGrid& grid, double burn_in);

    SamplerMethod method() const noexcept override { return SamplerMethod::truncated_ma; }
    std::size_t variates_per_path() const noexcept override { return burn_cells_ + grid().steps(); }
    void sample_into(std::span<double> values, GaussianSource& source) const override;

    double burn_in() const noexcept { return burn_in_; }

private:
    double burn_in_;
    std::size_t burn_cells_;
    double scale_;
    std::vector<double> kernel_; // ((l - 1/2) dt)^{H-1/2}, l = 1..burn+n
};

std::unique_ptr<PathSampler> make_sampler(SamplerMethod method, HurstParameter h, const TimeGrid& grid,
                                          const SamplerOptions& options = {});

SamplePath sample_cholesky(HurstParameter h, const TimeGrid& grid, GaussianSource& source);
SamplePath sample_hosking(HurstParameter h, const TimeGrid& grid, GaussianSource& source);
SamplePath sample_circulant(HurstParameter h, const TimeGrid& grid, GaussianSource& source);
// burn_in defaults to 50 horizons.
SamplePath sample_truncated_ma(HurstParameter h, const TimeGrid& grid, GaussianSource& source,
                               std::optional<double> burn_in = std::nullopt);

/// In-place lower Cholesky factor of a dense symmetric n x n row-major matrix.
/// Throws NumericError naming the first non-positive pivot.
void cholesky_factor(std::span<double> matrix, std::size_t n);

} // namespace fbm
