#pragma once

#include "fbmloss/model.hpp"
#include "fbmloss/samplers.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fbm {

/// One Monte Carlo experiment. Replication i draws its Gaussian stream from
/// SeedSpec{seed, i}, so the configuration alone fixes every output.
struct ExperimentConfig {
    ProcessParams params;
    std::size_t n = 1024;
    std::size_t reps = 10000;
    SamplerMethod method = SamplerMethod::circulant;
    std::uint64_t seed = 0;
    std::vector<double> x_grid;
    double confidence = 0.99;

    /// Throws ConfigError: reps >= 100, x_grid strictly increasing and
    /// non-negative, confidence in (0, 1), n a power of two for circulant.
    void validate() const;
};

struct RunOptions {
    // 0 = FBMLOSS_WORKERS from the environment, else hardware concurrency.
    std::size_t workers = 0;
    SamplerOptions sampler;
};

std::size_t resolve_workers(std::size_t requested);

/// Per-path summary kept by the harness.
struct ReplicationSummary {
    double sup = 0.0;
    double inf = 0.0;
    double range = 0.0;
    double max_loss = 0.0;
    // Maximum loss on the even-indexed sub-grid (step 2 dt); equals max_loss
    // when n is odd.
    double coarse_max_loss = 0.0;
    double terminal = 0.0;
};

/// All replications of one configuration, in stream order.
class ReplicationSet {
public:
    ReplicationSet(ExperimentConfig config, std::vector<ReplicationSummary> reps);

    const ExperimentConfig& config() const noexcept { return config_; }
    std::span<const ReplicationSummary> replications() const noexcept { return reps_; }
    std::size_t size() const noexcept { return reps_.size(); }

    /// Estimated amount by which the grid maximum loss understates the
    /// continuous one, in loss units. Assumes the discretisation error decays
    /// like dt^H and compares the grid with its step-2 sub-grid.
    double grid_bias_estimate() const;

    /// Every path multiplied by c > 0 (drives the harness sensitivity check).
    ReplicationSet scaled(double c) const;

private:
    ExperimentConfig config_;
    std::vector<ReplicationSummary> reps_;
};

/// Simulates config.reps paths. Numeric failures inside a replication are
/// rethrown as NumericError prefixed with the replication index.
ReplicationSet simulate(const ExperimentConfig& config, const RunOptions& options = {});

/// Generic parallel driver: calls visit(i, values) for each replication with
/// the transformed path (mu t + sigma B) on the config grid. `visit` runs
/// concurrently on distinct replications.
template <class Visitor>
void for_each_path(const ExperimentConfig& config, const RunOptions& options, Visitor&& visit);

struct EstimateRecord {
    std::string target;
    std::optional<double> x;
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<std::size_t> exceed_count;
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for k successes out of n at the given confidence.
Interval wilson_interval(std::size_t k, std::size_t n, double confidence);

/// z such that P(|Z| <= z) = confidence.
double two_sided_z(double confidence);

EstimateRecord estimate_expected_maxloss(const ReplicationSet& set);
EstimateRecord estimate_expected_maxloss(const ExperimentConfig& config, const RunOptions& options = {});

/// P(M > x) for each x in the configured grid, with Wilson intervals.
std::vector<EstimateRecord> estimate_tail(const ReplicationSet& set);
std::vector<EstimateRecord> estimate_tail(const ExperimentConfig& config, const RunOptions& options = {});

inline constexpr std::size_t kDefaultMinExceed = 50;

struct SlopeOptions {
    std::size_t min_exceed = kDefaultMinExceed;
    // Only x whose estimated exceedance lies in [p_min, p_max] enter the fit.
    double p_min = 1e-3;
    double p_max = 1e-1;
};

struct SlopePoint {
    double x = 0.0;
    double p_hat = 0.0;
    std::size_t exceed_count = 0;
    double pointwise = 0.0; // log(p_hat) / x^2
    // (1/x^2) log of the Gaussian-type lower bound (drift aware).
    double lower_envelope = 0.0;
    // (1/x^2) log of the unclipped Borel upper bound; absent for x <= eta,
    // drifted processes, or H < 1/2.
    std::optional<double> upper_envelope;
    bool in_fit = false;
};

struct SlopeFit {
    bool conclusive = false;
    std::string note;
    double x_min = 0.0;
    double x_max = 0.0;
    std::vector<SlopePoint> pointwise; // every x with exceed_count >= min_exceed
    double fitted_slope = 0.0;         // least squares of log p_hat on x^2
    double intercept = 0.0;
    double r_squared = 0.0;
    double theory_slope = 0.0;
};

SlopeFit fit_tail_slope(const ReplicationSet& set, const SlopeOptions& options = {});
SlopeFit fit_tail_slope(const ExperimentConfig& config, const SlopeOptions& slope = {},
                        const RunOptions& options = {});

enum class Verdict { pass, fail, inconclusive, not_applicable };
std::string_view to_string(Verdict verdict) noexcept;

struct CheckResult {
    std::string check;
    std::optional<double> x;
    std::optional<double> bound_low;  // analytic value the estimate must reach
    std::optional<double> bound_high; // analytic value the estimate must not exceed
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double slack = 0.0; // grid-bias allowance added on lower-bound checks
    std::optional<std::size_t> exceed_count;
    Verdict verdict = Verdict::not_applicable;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    double grid_bias = 0.0;

    bool passed() const noexcept;
    std::size_t count(Verdict v) const noexcept;
};

struct VerifyOptions {
    std::size_t min_exceed = kDefaultMinExceed;
    // Lower-bound checks accept p_hat + se_multiplier * SE (or the CI top,
    // whichever is larger) plus the grid-bias slack.
    double se_multiplier = 3.0;
};

/// Standard process (mu = 0, sigma = 1): expected-loss sandwich, Markov and
/// Borel upper bounds, Gaussian lower bound. Otherwise: the drift lower bound
/// only.
VerificationReport verify_bounds(const ReplicationSet& set, const VerifyOptions& options = {});
VerificationReport verify_bounds(const ExperimentConfig& config, const VerifyOptions& verify = {},
                                 const RunOptions& options = {});

struct RefinementRow {
    std::size_t n = 0;
    EstimateRecord estimate;
};

struct RefinementReport {
    std::vector<RefinementRow> rows;
    // Consecutive estimates never drop by more than 2 combined standard errors.
    bool monotone = true;
    // (E_{2n} - E_n) / (1 - 2^{-H}): extrapolated bias at the base n.
    std::optional<double> bias_estimate;
};

inline constexpr std::size_t kMaxRefinementSteps = std::size_t{1} << 20;

RefinementReport grid_refinement_study(const ExperimentConfig& base, std::size_t levels,
                                       const RunOptions& options = {},
                                       std::size_t max_steps = kMaxRefinementSteps);

struct RatioPoint {
    double x = 0.0;
    double ratio = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double reference = 0.0;
    std::size_t exceed_count = 0;
};

/// p_hat(x) / Phi-bar(x / t^H) where exceed_count >= min_exceed. Standard
/// process only.
std::vector<RatioPoint> talagrand_ratio_curve(const ReplicationSet& set,
                                              std::size_t min_exceed = kDefaultMinExceed);
std::vector<RatioPoint> talagrand_ratio_curve(const ExperimentConfig& config,
                                              std::size_t min_exceed = kDefaultMinExceed,
                                              const RunOptions& options = {});

} // namespace fbm

#include "fbmloss/detail/for_each_path.hpp"
