#include "fbmloss/samplers.hpp"

#include "fbmloss/errors.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fbm {

std::string_view to_string(SamplerMethod method) noexcept {
    switch (method) {
    case SamplerMethod::cholesky:
        return "cholesky";
    case SamplerMethod::hosking:
        return "hosking";
    case SamplerMethod::circulant:
        return "circulant";
    case SamplerMethod::truncated_ma:
        return "truncated_ma";
    }
    return "unknown";
}

SamplerMethod parse_sampler_method(std::string_view name) {
    for (auto m : {SamplerMethod::cholesky, SamplerMethod::hosking, SamplerMethod::circulant,
                   SamplerMethod::truncated_ma}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw ConfigError("unknown sampler method '" + std::string(name) +
                      "' (expected cholesky, hosking, circulant or truncated_ma)");
}

SamplePath PathSampler::sample(GaussianSource& source) const {
    std::vector<double> values(grid_.size());
    sample_into(values, source);
    return SamplePath(grid_, std::move(values));
}

void cholesky_factor(std::span<double> a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double* row_j = a.data() + j * n;
        double pivot = row_j[j];
        for (std::size_t k = 0; k < j; ++k) {
            pivot -= row_j[k] * row_j[k];
        }
        if (!(pivot > 0.0)) {
            throw NumericError("Cholesky factorization failed: non-positive pivot " + std::to_string(pivot) +
                               " at index " + std::to_string(j));
        }
        const double diag = std::sqrt(pivot);
        row_j[j] = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double* row_i = a.data() + i * n;
            double s = row_i[j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= row_i[k] * row_j[k];
            }
            row_i[j] = s / diag;
        }
        for (std::size_t k = j + 1; k < n; ++k) {
            row_j[k] = 0.0;
        }
    }
}

// --- Cholesky -------------------------------------------------------------

CholeskySampler::CholeskySampler(HurstParameter h, const TimeGrid& grid, std::size_t cap)
    : PathSampler(h, grid) {
    const std::size_t n = grid.steps();
    if (n > cap) {
        throw ConfigError("Cholesky sampler limited to " + std::to_string(cap) + " steps, got " +
                          std::to_string(n));
    }
    std::vector<double> cov(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double c = fbm_covariance(grid.point(i + 1), grid.point(j + 1), h);
            cov[i * n + j] = c;
            cov[j * n + i] = c;
        }
    }
    cholesky_factor(cov, n);
    factor_.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        factor_.insert(factor_.end(), cov.begin() + static_cast<std::ptrdiff_t>(i * n),
                       cov.begin() + static_cast<std::ptrdiff_t>(i * n + i + 1));
    }
}

void CholeskySampler::sample_into(std::span<double> values, GaussianSource& source) const {
    const std::size_t n = grid().steps();
    thread_local std::vector<double> z;
    z.resize(n);
    source.fill(z);
    values[0] = 0.0;
    const double* row = factor_.data();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            s += row[j] * z[j];
        }
        values[i + 1] = s;
        row += i + 1;
    }
}

// --- Hosking --------------------------------------------------------------

HoskingSampler::HoskingSampler(HurstParameter h, const TimeGrid& grid) : PathSampler(h, grid) {
    const std::size_t n = grid.steps();
    const double dt = grid.spacing();
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) {
        gamma[k] = increment_autocov(k, dt, h);
    }
    phi_.assign(n * (n - 1) / 2, 0.0);
    innovation_sd_.resize(n);

    double v = gamma[0];
    innovation_sd_[0] = std::sqrt(v);
    std::vector<double> prev;
    std::vector<double> cur;
    for (std::size_t k = 1; k < n; ++k) {
        double num = gamma[k];
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j - 1] * gamma[k - j];
        }
        const double partial = num / v;
        if (!(std::abs(partial) < 1.0)) {
            throw NumericError("Hosking recursion: partial correlation " + std::to_string(partial) +
                               " at lag " + std::to_string(k) + " is not inside (-1, 1)");
        }
        cur.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) {
            cur[j - 1] = prev[j - 1] - partial * prev[k - j - 1];
        }
        cur[k - 1] = partial;
        v *= (1.0 - partial * partial);
        if (!(v > 0.0)) {
            throw NumericError("Hosking recursion: innovation variance vanished at lag " + std::to_string(k));
        }
        std::copy(cur.begin(), cur.end(), phi_.begin() + static_cast<std::ptrdiff_t>(k * (k - 1) / 2));
        innovation_sd_[k] = std::sqrt(v);
        prev.swap(cur);
    }
}

std::span<const double> HoskingSampler::coefficients(std::size_t k) const {
    if (k == 0) {
        return {};
    }
    return std::span<const double>(phi_).subspan(k * (k - 1) / 2, k);
}

void HoskingSampler::sample_into(std::span<double> values, GaussianSource& source) const {
    const std::size_t n = grid().steps();
    thread_local std::vector<double> x;
    x.resize(n);
    source.fill(x);
    // x[k] holds Z_k on entry, the increment on exit.
    double level = 0.0;
    values[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double pred = 0.0;
        const double* phi = phi_.data() + (k == 0 ? 0 : k * (k - 1) / 2);
        for (std::size_t j = 1; j <= k; ++j) {
            pred += phi[j - 1] * x[k - j];
        }
        x[k] = pred + innovation_sd_[k] * x[k];
        level += x[k];
        values[k + 1] = level;
    }
}

// --- Circulant embedding ----------------------------------------------------

struct CirculantSampler::Plan {
    explicit Plan(std::size_t m) : fft(m) {}
    detail::Fft fft;
};

CirculantSampler::~CirculantSampler() = default;

CirculantSampler::CirculantSampler(HurstParameter h, const TimeGrid& grid) : PathSampler(h, grid) {
    const std::size_t n = grid.steps();
    std::size_t m = 2;
    while (m < 2 * n) {
        m <<= 1;
    }
    embedding_size_ = m;
    plan_ = std::make_unique<Plan>(m);

    const std::size_t half = m / 2;
    const double dt = grid.spacing();
    std::vector<double> re(m, 0.0);
    std::vector<double> im(m, 0.0);
    for (std::size_t j = 0; j <= half; ++j) {
        re[j] = increment_autocov(j, dt, h);
    }
    for (std::size_t j = 1; j < half; ++j) {
        re[m - j] = re[j];
    }
    plan_->fft.transform(re, im);

    const double largest = *std::max_element(re.begin(), re.end());
    eigenvalues_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lambda = re[k];
        if (lambda < 0.0) {
            if (lambda < -kEigenTolerance * largest) {
                throw NumericError("circulant embedding is not non-negative definite: eigenvalue " +
                                   std::to_string(lambda) + " at index " + std::to_string(k));
            }
            lambda = 0.0;
        }
        eigenvalues_[k] = lambda;
    }

    const double md = static_cast<double>(m);
    weights_.resize(half + 1);
    weights_[0] = std::sqrt(eigenvalues_[0] / md);
    weights_[half] = std::sqrt(eigenvalues_[half] / md);
    for (std::size_t k = 1; k < half; ++k) {
        weights_[k] = std::sqrt(eigenvalues_[k] / (2.0 * md));
    }
}

void CirculantSampler::sample_into(std::span<double> values, GaussianSource& source) const {
    const std::size_t m = embedding_size_;
    const std::size_t half = m / 2;
    thread_local std::vector<double> z;
    thread_local std::vector<double> re;
    thread_local std::vector<double> im;
    z.resize(m);
    re.resize(m);
    im.resize(m);
    source.fill(z);

    // Hermitian spectrum: W_0 and W_{m/2} real, W_{m-k} = conj(W_k).
    re[0] = weights_[0] * z[0];
    im[0] = 0.0;
    re[half] = weights_[half] * z[1];
    im[half] = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        const double a = weights_[k] * z[2 * k];
        const double b = weights_[k] * z[2 * k + 1];
        re[k] = a;
        im[k] = b;
        re[m - k] = a;
        im[m - k] = -b;
    }
    plan_->fft.transform(re, im);

    const std::size_t n = grid().steps();
    double level = 0.0;
    values[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        level += re[i];
        values[i + 1] = level;
    }
}

// --- Truncated moving average -------------------------------------------------

TruncatedMaSampler::TruncatedMaSampler(HurstParameter h, const TimeGrid& grid, double burn_in)
    : PathSampler(h, grid), burn_in_(burn_in) {
    if (h.value() < 0.5) {
        throw ScopeError("truncated moving-average sampler requires H >= 1/2");
    }
    if (!(burn_in >= 10.0 * grid.horizon())) {
        throw DomainError("truncated moving-average burn-in must be at least 10 horizons");
    }
    const double dt = grid.spacing();
    burn_cells_ = static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-9));
    const double alpha = h.value() - 0.5;
    const std::size_t total = burn_cells_ + grid.steps();
    kernel_.resize(total + 1);
    kernel_[0] = 0.0;
    for (std::size_t l = 1; l <= total; ++l) {
        kernel_[l] = std::pow((static_cast<double>(l) - 0.5) * dt, alpha);
    }
    // 1/Gamma(H+1/2) alone gives Var(B_1) = 1/(Gamma(2H+1) sin(pi H)); fold in
    // the correction so the untruncated integral is standard fBm.
    const double hv = h.value();
    const double unit = std::sqrt(std::tgamma(2.0 * hv + 1.0) * std::sin(std::numbers::pi * hv));
    scale_ = unit / std::tgamma(hv + 0.5) * std::sqrt(dt);
}

void TruncatedMaSampler::sample_into(std::span<double> values, GaussianSource& source) const {
    const std::size_t n = grid().steps();
    const std::size_t burn = burn_cells_;
    thread_local std::vector<double> z;
    z.resize(burn + n);
    source.fill(z);
    // z[burn + j] drives cell [j dt, (j+1) dt], j = -burn .. n-1.
    double past = 0.0;
    for (std::size_t l = 1; l <= burn; ++l) {
        past += kernel_[l] * z[burn - l];
    }
    values[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        double s = 0.0;
        const std::size_t top = burn + i; // cells j < i
        for (std::size_t c = 0; c < top; ++c) {
            s += kernel_[top - c] * z[c];
        }
        values[i] = scale_ * (s - past);
    }
}

// --- factories ----------------------------------------------------------------

std::unique_ptr<PathSampler> make_sampler(SamplerMethod method, HurstParameter h, const TimeGrid& grid,
                                          const SamplerOptions& options) {
    switch (method) {
    case SamplerMethod::cholesky:
        return std::make_unique<CholeskySampler>(h, grid, options.cholesky_cap);
    case SamplerMethod::hosking:
        return std::make_unique<HoskingSampler>(h, grid);
    case SamplerMethod::circulant:
        return std::make_unique<CirculantSampler>(h, grid);
    case SamplerMethod::truncated_ma:
        return std::make_unique<TruncatedMaSampler>(h, grid, options.burn_in_horizons * grid.horizon());
    }
    throw ConfigError("unknown sampler method");
}

SamplePath sample_cholesky(HurstParameter h, const TimeGrid& grid, GaussianSource& source) {
    return CholeskySampler(h, grid).sample(source);
}

SamplePath sample_hosking(HurstParameter h, const TimeGrid& grid, GaussianSource& source) {
    return HoskingSampler(h, grid).sample(source);
}

SamplePath sample_circulant(HurstParameter h, const TimeGrid& grid, GaussianSource& source) {
    return CirculantSampler(h, grid).sample(source);
}

SamplePath sample_truncated_ma(HurstParameter h, const TimeGrid& grid, GaussianSource& source,
                               std::optional<double> burn_in) {
    return TruncatedMaSampler(h, grid, burn_in.value_or(50.0 * grid.horizon())).sample(source);
}

} // namespace fbm
