#pragma once

#include "fbmloss/model.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace fbm {

/// Standard normal upper tail 1 - Phi(x). Uses erfc for x <= 8 and the
/// asymptotic series beyond.
double normal_upper_tail(double x);
/// log(1 - Phi(x)); finite for arbitrarily large x.
double log_normal_upper_tail(double x);

/// Sandwich on E[M_a] for H >= 1/2: lower = sqrt(2) a^H / (2 sqrt(pi)),
/// upper = 4 lower.
struct ExpectedLossBounds {
    double lower = 0.0;
    double upper = 0.0;
    double horizon = 0.0;
    double hurst = 0.0;
};

struct SupBounds {
    double lower = 0.0;
    double upper = 0.0;
};

ExpectedLossBounds expected_maxloss_bounds(double a, HurstParameter h);
SupBounds expected_sup_bounds(double a, HurstParameter h);

/// min(1, 2 sqrt(2) a^H / (y sqrt(pi))).
double tail_markov_upper(double a, HurstParameter h, double y);
/// Unclipped value of the above (exceeds 1 for small y).
double tail_markov_upper_raw(double a, HurstParameter h, double y);

/// Phi-bar(x / t^H): P(M_t > x) is at least this for every x > 0.
double tail_gaussian_lower(double t, HurstParameter h, double x);

/// min(1, 2 exp(-(x - eta)^2 / (2 t^{2H}))), defined for x > eta. eta defaults
/// to the upper bound on E[M_t].
double tail_borel_upper(double t, HurstParameter h, double x, std::optional<double> eta = std::nullopt);
/// log of the unclipped Borel bound; usable where the bound underflows.
double log_tail_borel_upper(double t, HurstParameter h, double x, std::optional<double> eta = std::nullopt);

/// lim (1/x^2) log P(M_t > x) = -1 / (2 sigma^2 t^{2H}).
double asymptotic_slope(double t, HurstParameter h, double sigma = 1.0);

enum class DriftRegime { interior, endpoint_t };
std::string_view to_string(DriftRegime regime) noexcept;

/// Minimiser of f(v) = (x + mu v) / (sigma v^H) on (0, t] and the resulting
/// lower bound Phi-bar(f(minimizer)) on P(M_t > x) for Y = mu t + sigma B.
struct DriftTailAnalysis {
    // x H / (mu (1 - H)); only meaningful for mu > 0.
    std::optional<double> v_star;
    double minimizer = 0.0;
    double f_min = 0.0;
    double bound = 0.0;
    double log_bound = 0.0;
    DriftRegime regime = DriftRegime::endpoint_t;
};

DriftTailAnalysis drift_minimizer(double t, HurstParameter h, double mu, double x, double sigma = 1.0);

/// E[B_t (B_u - B_v)] for 0 <= u <= v <= t.
double endpoint_covariance(double u, double v, double t, HurstParameter h);

/// Exhaustive lattice scan of the near-maximal set
/// T_h = {(u, v): E[B_t (B_u - B_v)] >= t^{2H} - h^2}.
struct ThScanResult {
    double horizon = 0.0;
    double hurst = 0.0;
    double h_param = 0.0;
    std::size_t grid_n = 0;
    struct Member {
        double u;
        double v;
        double covariance;
    };
    std::vector<Member> members;
    double max_gap = 0.0;     // max over members of t - v
    double k_bound = 0.0;     // slack t^{1-2H} / H
    double gap_limit = 0.0;   // k_bound h^2
    bool contained = false;   // every member has v >= t - gap_limit
    bool unique_maximizer = false; // (0, t) strictly beats every other lattice pair
    double runner_up = 0.0;   // largest covariance among pairs other than (0, t)

    bool passed() const noexcept { return contained && unique_maximizer; }
};

ThScanResult th_scan(double t, HurstParameter h, double h_param, std::size_t grid_n, double slack = 2.0);

/// Normal tail at the maximal-variance point, Phi-bar(x / t^H).
double talagrand_reference(double x, double t, HurstParameter h);

/// Every bound at one loss level, probabilities clipped to [0, 1].
struct TailBoundSet {
    double x = 0.0;
    double markov_upper = 1.0;
    double gaussian_lower = 0.0;
    std::optional<double> borel_upper; // only for x > eta
    double eta = 0.0;
};

/// Requires H >= 1/2 (Markov and Borel bounds rest on the E[M] sandwich).
TailBoundSet tail_bounds(double t, HurstParameter h, double x);

} // namespace fbm
