#include "fbmloss/montecarlo.hpp"

#include "fbmloss/bounds.hpp"
#include "fbmloss/errors.hpp"
#include "fbmloss/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace fbm {

// --- configuration ------------------------------------------------------------

void ExperimentConfig::validate() const {
    try {
        params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (n == 0) {
        throw ConfigError("n must be at least 1");
    }
    if (method == SamplerMethod::circulant && (n & (n - 1)) != 0) {
        throw ConfigError("circulant sampler needs n to be a power of two, got " + std::to_string(n));
    }
    if (reps < 100) {
        throw ConfigError("reps must be at least 100, got " + std::to_string(reps));
    }
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] >= 0.0) || !std::isfinite(x_grid[i])) {
            throw ConfigError("x_grid entries must be finite and non-negative");
        }
        if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
            throw ConfigError("x_grid must be strictly increasing");
        }
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ConfigError("confidence must lie in (0, 1)");
    }
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("FBMLOSS_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// --- parallel driver -----------------------------------------------------------

namespace detail {

void run_indexed(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> failed_at(workers, kNone);
    std::vector<std::exception_ptr> errors(workers);

    const std::size_t chunk = count == 0 ? 0 : (count + workers - 1) / workers;
    auto run_block = [&](std::size_t w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
            try {
                task(i);
            } catch (...) {
                failed_at[w] = i;
                errors[w] = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        run_block(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(run_block, w);
        }
    }

    const auto first = std::min_element(failed_at.begin(), failed_at.end());
    if (*first == kNone) {
        return;
    }
    const std::size_t index = *first;
    try {
        std::rethrow_exception(errors[static_cast<std::size_t>(first - failed_at.begin())]);
    } catch (const NumericError& e) {
        throw NumericError("replication " + std::to_string(index) + ": " + e.what());
    }
}

void apply_drift_diffusion(std::span<double> values, const TimeGrid& grid, const ProcessParams& params) {
    if (params.is_standard()) {
        return;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = params.mu * grid.point(i) + params.sigma * values[i];
    }
}

} // namespace detail

// --- replication sets ---------------------------------------------------------

ReplicationSet::ReplicationSet(ExperimentConfig config, std::vector<ReplicationSummary> reps)
    : config_(std::move(config)), reps_(std::move(reps)) {}

double ReplicationSet::grid_bias_estimate() const {
    if (config_.n < 2 || config_.n % 2 != 0 || reps_.empty()) {
        return 0.0;
    }
    double diff = 0.0;
    for (const auto& r : reps_) {
        diff += r.max_loss - r.coarse_max_loss;
    }
    diff /= static_cast<double>(reps_.size());
    return diff / (std::pow(2.0, config_.params.hurst.value()) - 1.0);
}

ReplicationSet ReplicationSet::scaled(double c) const {
    if (!(c > 0.0)) {
        throw DomainError("scale factor must be positive");
    }
    std::vector<ReplicationSummary> out(reps_);
    for (auto& r : out) {
        r.sup *= c;
        r.inf *= c;
        r.range *= c;
        r.max_loss *= c;
        r.coarse_max_loss *= c;
        r.terminal *= c;
    }
    return ReplicationSet(config_, std::move(out));
}

ReplicationSet simulate(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    std::vector<ReplicationSummary> out(config.reps);
    const bool coarse = config.n % 2 == 0;
    for_each_path(config, options, [&](std::size_t i, std::span<const double> values) {
        const PathStatistics st = compute_stats(values);
        ReplicationSummary& r = out[i];
        r.sup = st.sup;
        r.inf = st.inf;
        r.range = st.range;
        r.max_loss = st.max_loss;
        r.terminal = values.back();
        if (coarse) {
            double run_max = values[0];
            double best = 0.0;
            for (std::size_t k = 0; k < values.size(); k += 2) {
                run_max = std::max(run_max, values[k]);
                best = std::max(best, run_max - values[k]);
            }
            r.coarse_max_loss = best;
        } else {
            r.coarse_max_loss = st.max_loss;
        }
    });
    return ReplicationSet(config, std::move(out));
}

// --- estimators ---------------------------------------------------------------

double two_sided_z(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw DomainError("confidence must lie in (0, 1)");
    }
    return normal_quantile(0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n) {
        throw DomainError("wilson_interval needs 0 <= k <= n, n > 0");
    }
    const double z = two_sided_z(confidence);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

EstimateRecord estimate_expected_maxloss(const ReplicationSet& set) {
    const auto reps = set.replications();
    const double n = static_cast<double>(reps.size());
    double sum = 0.0;
    for (const auto& r : reps) {
        sum += r.max_loss;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : reps) {
        const double d = r.max_loss - mean;
        ss += d * d;
    }
    const double se = reps.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    const double z = two_sided_z(set.config().confidence);
    EstimateRecord rec;
    rec.target = "E[M]";
    rec.estimate = mean;
    rec.std_error = se;
    rec.ci_low = mean - z * se;
    rec.ci_high = mean + z * se;
    return rec;
}

EstimateRecord estimate_expected_maxloss(const ExperimentConfig& config, const RunOptions& options) {
    return estimate_expected_maxloss(simulate(config, options));
}

std::vector<EstimateRecord> estimate_tail(const ReplicationSet& set) {
    const auto& cfg = set.config();
    const auto reps = set.replications();
    const std::size_t n = reps.size();
    std::vector<double> losses(n);
    std::transform(reps.begin(), reps.end(), losses.begin(), [](const auto& r) { return r.max_loss; });
    std::sort(losses.begin(), losses.end());

    std::vector<EstimateRecord> out;
    out.reserve(cfg.x_grid.size());
    for (const double x : cfg.x_grid) {
        const auto above = static_cast<std::size_t>(losses.end() - std::upper_bound(losses.begin(), losses.end(), x));
        const double p = static_cast<double>(above) / static_cast<double>(n);
        const Interval ci = wilson_interval(above, n, cfg.confidence);
        EstimateRecord rec;
        rec.target = "P(M>x)";
        rec.x = x;
        rec.estimate = p;
        rec.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        rec.ci_low = ci.low;
        rec.ci_high = ci.high;
        rec.exceed_count = above;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<EstimateRecord> estimate_tail(const ExperimentConfig& config, const RunOptions& options) {
    return estimate_tail(simulate(config, options));
}

// --- tail slope ----------------------------------------------------------------

SlopeFit fit_tail_slope(const ReplicationSet& set, const SlopeOptions& options) {
    const auto& cfg = set.config();
    const auto& p = cfg.params;
    SlopeFit fit;
    fit.theory_slope = asymptotic_slope(p.horizon, p.hurst, p.sigma);

    std::optional<double> eta;
    if (p.mu == 0.0 && p.hurst.in_paper_scope()) {
        eta = expected_maxloss_bounds(p.horizon, p.hurst).upper;
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& rec : estimate_tail(set)) {
        const double x = *rec.x;
        const std::size_t k = *rec.exceed_count;
        if (x <= 0.0 || k < options.min_exceed || rec.estimate >= 1.0) {
            continue;
        }
        SlopePoint pt;
        pt.x = x;
        pt.p_hat = rec.estimate;
        pt.exceed_count = k;
        const double x2 = x * x;
        pt.pointwise = std::log(rec.estimate) / x2;
        pt.lower_envelope = drift_minimizer(p.horizon, p.hurst, p.mu, x, p.sigma).log_bound / x2;
        if (eta && x / p.sigma > *eta) {
            pt.upper_envelope = log_tail_borel_upper(p.horizon, p.hurst, x / p.sigma, *eta) / x2;
        }
        pt.in_fit = rec.estimate >= options.p_min && rec.estimate <= options.p_max;
        if (pt.in_fit) {
            xs.push_back(x2);
            ys.push_back(std::log(rec.estimate));
        }
        fit.pointwise.push_back(pt);
    }

    if (xs.size() < 3) {
        fit.note = "inconclusive: " + std::to_string(xs.size()) + " x values with at least " +
                   std::to_string(options.min_exceed) + " exceedances inside the fit window (need 3)";
        return fit;
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.conclusive = true;
    fit.fitted_slope = sxy / sxx;
    fit.intercept = my - fit.fitted_slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.x_min = std::sqrt(xs.front());
    fit.x_max = std::sqrt(xs.back());
    return fit;
}

SlopeFit fit_tail_slope(const ExperimentConfig& config, const SlopeOptions& slope, const RunOptions& options) {
    return fit_tail_slope(simulate(config, options), slope);
}

// --- verification ---------------------------------------------------------------

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    case Verdict::not_applicable:
        return "not_applicable";
    }
    return "unknown";
}

bool VerificationReport::passed() const noexcept { return count(Verdict::fail) == 0; }

std::size_t VerificationReport::count(Verdict v) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [v](const CheckResult& c) { return c.verdict == v; }));
}

namespace {

CheckResult tail_check(std::string name, const EstimateRecord& rec) {
    CheckResult c;
    c.check = std::move(name);
    c.x = rec.x;
    c.estimate = rec.estimate;
    c.std_error = rec.std_error;
    c.ci_low = rec.ci_low;
    c.ci_high = rec.ci_high;
    c.exceed_count = rec.exceed_count;
    return c;
}

Verdict failure_or_inconclusive(const CheckResult& c, std::size_t min_exceed) {
    return c.exceed_count.value_or(0) < min_exceed ? Verdict::inconclusive : Verdict::fail;
}

void judge_upper(CheckResult& c, double bound, std::size_t min_exceed) {
    c.bound_high = bound;
    c.verdict = c.ci_low <= bound ? Verdict::pass : failure_or_inconclusive(c, min_exceed);
}

void judge_lower(CheckResult& c, double bound, double slack, const VerifyOptions& opt) {
    c.bound_low = bound;
    c.slack = slack;
    const double reach = std::max(c.ci_high, c.estimate + opt.se_multiplier * c.std_error) + slack;
    c.verdict = reach >= bound ? Verdict::pass : failure_or_inconclusive(c, opt.min_exceed);
}

CheckResult not_applicable(std::string name, const EstimateRecord& rec, std::string why) {
    CheckResult c = tail_check(std::move(name), rec);
    c.verdict = Verdict::not_applicable;
    c.note = std::move(why);
    return c;
}

} // namespace

VerificationReport verify_bounds(const ReplicationSet& set, const VerifyOptions& options) {
    const auto& cfg = set.config();
    const auto& p = cfg.params;
    const double t = p.horizon;
    const HurstParameter h = p.hurst;
    const bool in_scope = h.in_paper_scope();

    VerificationReport report;
    report.grid_bias = set.grid_bias_estimate();
    const double bias = report.grid_bias;
    const auto tail = estimate_tail(set);

    if (!p.is_standard()) {
        for (const auto& rec : tail) {
            const double x = *rec.x;
            if (x <= 0.0) {
                report.checks.push_back(not_applicable("drift_lower", rec, "bound needs x > 0"));
                continue;
            }
            CheckResult c = tail_check("drift_lower", rec);
            const double bound = drift_minimizer(t, h, p.mu, x, p.sigma).bound;
            const double shifted = drift_minimizer(t, h, p.mu, x + bias, p.sigma).bound;
            judge_lower(c, bound, std::max(0.0, bound - shifted), options);
            c.note = std::string(to_string(drift_minimizer(t, h, p.mu, x, p.sigma).regime));
            report.checks.push_back(std::move(c));
        }
        return report;
    }

    {
        const EstimateRecord em = estimate_expected_maxloss(set);
        CheckResult c;
        c.check = "expected_loss_sandwich";
        c.estimate = em.estimate;
        c.std_error = em.std_error;
        c.ci_low = em.ci_low;
        c.ci_high = em.ci_high;
        if (in_scope) {
            const auto b = expected_maxloss_bounds(t, h);
            c.bound_low = b.lower;
            c.bound_high = b.upper;
            c.verdict = (em.ci_low >= b.lower && em.ci_high <= b.upper) ? Verdict::pass : Verdict::fail;
        } else {
            c.note = "stated for H >= 1/2 only";
        }
        report.checks.push_back(std::move(c));
    }

    const double eta = in_scope ? expected_maxloss_bounds(t, h).upper : 0.0;
    for (const auto& rec : tail) {
        const double x = *rec.x;
        if (x <= 0.0) {
            for (const char* name : {"markov_upper", "gaussian_lower", "borel_upper"}) {
                report.checks.push_back(not_applicable(name, rec, "bound needs x > 0"));
            }
            continue;
        }
        if (in_scope) {
            CheckResult c = tail_check("markov_upper", rec);
            judge_upper(c, tail_markov_upper(t, h, x), options.min_exceed);
            report.checks.push_back(std::move(c));
        } else {
            report.checks.push_back(not_applicable("markov_upper", rec, "stated for H >= 1/2 only"));
        }
        {
            CheckResult c = tail_check("gaussian_lower", rec);
            const double bound = tail_gaussian_lower(t, h, x);
            judge_lower(c, bound, std::max(0.0, bound - tail_gaussian_lower(t, h, x + bias)), options);
            report.checks.push_back(std::move(c));
        }
        if (!in_scope) {
            report.checks.push_back(not_applicable("borel_upper", rec, "stated for H >= 1/2 only"));
        } else if (x <= eta) {
            report.checks.push_back(not_applicable("borel_upper", rec, "x <= eta"));
        } else {
            CheckResult c = tail_check("borel_upper", rec);
            judge_upper(c, tail_borel_upper(t, h, x, eta), options.min_exceed);
            report.checks.push_back(std::move(c));
        }
    }
    return report;
}

VerificationReport verify_bounds(const ExperimentConfig& config, const VerifyOptions& verify,
                                 const RunOptions& options) {
    return verify_bounds(simulate(config, options), verify);
}

// --- refinement -----------------------------------------------------------------

RefinementReport grid_refinement_study(const ExperimentConfig& base, std::size_t levels,
                                       const RunOptions& options, std::size_t max_steps) {
    if (levels == 0) {
        throw ConfigError("refinement study needs at least one level");
    }
    base.validate();
    if (levels > 40 || base.n > (max_steps >> (levels - 1))) {
        throw ConfigError("refinement to " + std::to_string(levels) + " levels from n = " +
                          std::to_string(base.n) + " exceeds the cap of " + std::to_string(max_steps) +
                          " steps");
    }
    RefinementReport report;
    for (std::size_t l = 0; l < levels; ++l) {
        ExperimentConfig cfg = base;
        cfg.n = base.n << l;
        report.rows.push_back({cfg.n, estimate_expected_maxloss(cfg, options)});
    }
    for (std::size_t l = 1; l < report.rows.size(); ++l) {
        const auto& a = report.rows[l - 1].estimate;
        const auto& b = report.rows[l].estimate;
        const double tol = 2.0 * std::hypot(a.std_error, b.std_error);
        if (b.estimate < a.estimate - tol) {
            report.monotone = false;
        }
    }
    if (report.rows.size() >= 2) {
        const double step = report.rows[1].estimate.estimate - report.rows[0].estimate.estimate;
        report.bias_estimate = step / (1.0 - std::pow(2.0, -base.params.hurst.value()));
    }
    return report;
}

// --- Talagrand ratio --------------------------------------------------------------

std::vector<RatioPoint> talagrand_ratio_curve(const ReplicationSet& set, std::size_t min_exceed) {
    const auto& p = set.config().params;
    if (!p.is_standard()) {
        throw ConfigError("the Talagrand ratio curve is defined for mu = 0, sigma = 1 only");
    }
    std::vector<RatioPoint> out;
    for (const auto& rec : estimate_tail(set)) {
        const double x = *rec.x;
        if (x <= 0.0 || *rec.exceed_count < min_exceed) {
            continue;
        }
        RatioPoint pt;
        pt.x = x;
        pt.reference = talagrand_reference(x, p.horizon, p.hurst);
        pt.ratio = rec.estimate / pt.reference;
        pt.ci_low = rec.ci_low / pt.reference;
        pt.ci_high = rec.ci_high / pt.reference;
        pt.exceed_count = *rec.exceed_count;
        out.push_back(pt);
    }
    return out;
}

std::vector<RatioPoint> talagrand_ratio_curve(const ExperimentConfig& config, std::size_t min_exceed,
                                              const RunOptions& options) {
    return talagrand_ratio_curve(simulate(config, options), min_exceed);
}

} // namespace fbm
