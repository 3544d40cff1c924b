#include "fbmloss/bounds.hpp"

#include "fbmloss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fbm {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrtPi = std::sqrt(std::numbers::pi);
// sqrt(2) / (2 sqrt(pi)): lower constant of the sandwich on E[S] and E[M].
const double kLowerConst = kSqrt2 / (2.0 * kSqrtPi);
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

constexpr double kAsymptoticCutover = 8.0;

// 1 - 1/x^2 + 3/x^4 - 15/x^6 + ... ; 20 terms reach ~1e-12 at x = 8.
double mills_series(double x) {
    const double inv2 = 1.0 / (x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 20; ++k) {
        term *= -static_cast<double>(2 * k - 1) * inv2;
        sum += term;
    }
    return sum;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_paper_scope(HurstParameter h, const char* what) {
    if (!h.in_paper_scope()) {
        throw ScopeError(std::string(what) + " is only established for H >= 1/2 (got H = " +
                         std::to_string(h.value()) + ")");
    }
}

double clip_probability(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace

double normal_upper_tail(double x) {
    if (x <= kAsymptoticCutover) {
        return 0.5 * std::erfc(x / kSqrt2);
    }
    return std::exp(-0.5 * x * x - kHalfLog2Pi) / x * mills_series(x);
}

double log_normal_upper_tail(double x) {
    if (x <= kAsymptoticCutover) {
        return std::log(normal_upper_tail(x));
    }
    return -0.5 * x * x - std::log(x) - kHalfLog2Pi + std::log(mills_series(x));
}

ExpectedLossBounds expected_maxloss_bounds(double a, HurstParameter h) {
    require_positive(a, "horizon");
    require_paper_scope(h, "the expected maximum-loss sandwich");
    const double lower = kLowerConst * std::pow(a, h.value());
    return {lower, 4.0 * lower, a, h.value()};
}

SupBounds expected_sup_bounds(double a, HurstParameter h) {
    require_positive(a, "horizon");
    require_paper_scope(h, "the expected supremum sandwich");
    const double lower = kLowerConst * std::pow(a, h.value());
    return {lower, 2.0 * lower};
}

double tail_markov_upper_raw(double a, HurstParameter h, double y) {
    require_positive(y, "loss level");
    return expected_maxloss_bounds(a, h).upper / y;
}

double tail_markov_upper(double a, HurstParameter h, double y) {
    return std::min(1.0, tail_markov_upper_raw(a, h, y));
}

double tail_gaussian_lower(double t, HurstParameter h, double x) {
    require_positive(t, "horizon");
    require_positive(x, "loss level");
    return normal_upper_tail(x / std::pow(t, h.value()));
}

double log_tail_borel_upper(double t, HurstParameter h, double x, std::optional<double> eta) {
    require_positive(t, "horizon");
    const double level = eta ? *eta : expected_maxloss_bounds(t, h).upper;
    if (level < 0.0) {
        throw DomainError("eta must be non-negative");
    }
    if (!(x > level)) {
        throw DomainError("bound undefined below eta: x = " + std::to_string(x) +
                          " <= eta = " + std::to_string(level));
    }
    const double excess = x - level;
    return std::log(2.0) - excess * excess / (2.0 * std::pow(t, 2.0 * h.value()));
}

double tail_borel_upper(double t, HurstParameter h, double x, std::optional<double> eta) {
    return std::min(1.0, std::exp(log_tail_borel_upper(t, h, x, eta)));
}

double asymptotic_slope(double t, HurstParameter h, double sigma) {
    require_positive(t, "horizon");
    require_positive(sigma, "sigma");
    return -1.0 / (2.0 * sigma * sigma * std::pow(t, 2.0 * h.value()));
}

std::string_view to_string(DriftRegime regime) noexcept {
    return regime == DriftRegime::interior ? "interior" : "endpoint_t";
}

DriftTailAnalysis drift_minimizer(double t, HurstParameter h, double mu, double x, double sigma) {
    require_positive(t, "horizon");
    require_positive(x, "loss level");
    require_positive(sigma, "sigma");
    if (!std::isfinite(mu)) {
        throw DomainError("mu must be finite");
    }
    const double hv = h.value();
    DriftTailAnalysis out;
    if (mu > 0.0) {
        out.v_star = x * hv / (mu * (1.0 - hv));
        const double threshold = t * mu * (1.0 - hv) / hv;
        if (x < threshold) {
            out.regime = DriftRegime::interior;
            out.minimizer = *out.v_star;
        }
    }
    if (out.regime == DriftRegime::endpoint_t) {
        out.minimizer = t;
    }
    out.f_min = (x + mu * out.minimizer) / (sigma * std::pow(out.minimizer, hv));
    out.bound = normal_upper_tail(out.f_min);
    out.log_bound = log_normal_upper_tail(out.f_min);
    return out;
}

double endpoint_covariance(double u, double v, double t, HurstParameter h) {
    if (!(0.0 <= u && u <= v && v <= t)) {
        throw DomainError("endpoint_covariance requires 0 <= u <= v <= t");
    }
    const double e = 2.0 * h.value();
    return 0.5 * (std::pow(v, e) - std::pow(u, e) + std::pow(t - u, e) - std::pow(t - v, e));
}

ThScanResult th_scan(double t, HurstParameter h, double h_param, std::size_t grid_n, double slack) {
    require_positive(t, "horizon");
    require_positive(h_param, "h");
    if (grid_n < 16) {
        throw DomainError("th_scan needs grid_n >= 16");
    }
    const double e = 2.0 * h.value();
    const double peak = std::pow(t, e);
    if (!(h_param * h_param < peak / 2.0)) {
        throw DomainError("th_scan needs h^2 < t^{2H} / 2");
    }

    const TimeGrid lattice(t, grid_n);
    std::vector<double> up(grid_n + 1);   // p_i^{2H}
    std::vector<double> down(grid_n + 1); // (t - p_i)^{2H}
    for (std::size_t i = 0; i <= grid_n; ++i) {
        const double p = lattice.point(i);
        up[i] = std::pow(p, e);
        down[i] = std::pow(t - p, e);
    }

    ThScanResult out;
    out.horizon = t;
    out.hurst = h.value();
    out.h_param = h_param;
    out.grid_n = grid_n;
    out.k_bound = slack * std::pow(t, 1.0 - e) / h.value();
    out.gap_limit = out.k_bound * h_param * h_param;
    out.contained = true;
    out.runner_up = -std::numeric_limits<double>::infinity();

    const double threshold = peak - h_param * h_param;
    const double v_floor = t - out.gap_limit;
    double best_at_corner = 0.0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        for (std::size_t j = i; j <= grid_n; ++j) {
            const double cov = 0.5 * (up[j] - up[i] + down[i] - down[j]);
            const bool corner = (i == 0 && j == grid_n);
            if (corner) {
                best_at_corner = cov;
            } else {
                out.runner_up = std::max(out.runner_up, cov);
            }
            if (cov >= threshold) {
                const double v = lattice.point(j);
                out.members.push_back({lattice.point(i), v, cov});
                out.max_gap = std::max(out.max_gap, t - v);
                if (v < v_floor) {
                    out.contained = false;
                }
            }
        }
    }
    out.unique_maximizer = best_at_corner == peak && out.runner_up < peak;
    return out;
}

double talagrand_reference(double x, double t, HurstParameter h) {
    require_positive(x, "loss level");
    require_positive(t, "horizon");
    return normal_upper_tail(x / std::pow(t, h.value()));
}

TailBoundSet tail_bounds(double t, HurstParameter h, double x) {
    TailBoundSet out;
    out.x = x;
    out.eta = expected_maxloss_bounds(t, h).upper;
    out.markov_upper = tail_markov_upper(t, h, x);
    out.gaussian_lower = clip_probability(tail_gaussian_lower(t, h, x));
    if (x > out.eta) {
        out.borel_upper = tail_borel_upper(t, h, x, out.eta);
    }
    return out;
}

} // namespace fbm
