#include "fbmloss_cli/cli.hpp"

#include "fbmloss/bounds.hpp"
#include "fbmloss/errors.hpp"
#include "fbmloss/io.hpp"
#include "fbmloss/montecarlo.hpp"
#include "fbmloss/path_stats.hpp"
#include "fbmloss/samplers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <set>

namespace fbm::cli {
namespace {

struct Flags {
    std::string config_path;
    double hurst = 0.0;
    double horizon = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::vector<double> x_grid;
    double h_param = 0.0;
    std::size_t grid_n = 512;
    std::string out_path;
    std::string report_path;
};

struct Options {
    CLI::Option* config = nullptr;
    CLI::Option* hurst = nullptr;
    CLI::Option* horizon = nullptr;
    CLI::Option* mu = nullptr;
    CLI::Option* sigma = nullptr;
    CLI::Option* n = nullptr;
    CLI::Option* reps = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* method = nullptr;
    CLI::Option* x_grid = nullptr;
    CLI::Option* h_param = nullptr;
    CLI::Option* grid_n = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* report = nullptr;
};

enum Needs : unsigned {
    kProcess = 1u,
    kStochastic = 2u,
    kXGrid = 4u,
    kScan = 8u,
    kReport = 16u,
};

Options add_flags(CLI::App& sub, Flags& f, unsigned needs) {
    Options o;
    o.config = sub.add_option("--config", f.config_path, "JSON config file; flags override its values");
    o.hurst = sub.add_option("--hurst", f.hurst, "Hurst exponent H in (0, 1)");
    o.horizon = sub.add_option("--horizon", f.horizon, "time horizon t > 0");
    if (needs & kProcess) {
        o.mu = sub.add_option("--mu", f.mu, "drift (default 0)");
        o.sigma = sub.add_option("--sigma", f.sigma, "diffusion coefficient (default 1)");
    }
    if (needs & kStochastic) {
        o.n = sub.add_option("--n", f.n, "grid steps (default 1024)");
        o.reps = sub.add_option("--reps", f.reps, "replications (default 10000)");
        o.seed = sub.add_option("--seed", f.seed, "master seed (default 0)");
        o.method = sub.add_option("--method", f.method, "cholesky | hosking | circulant | truncated_ma");
    }
    if (needs & kXGrid) {
        o.x_grid = sub.add_option("--x-grid", f.x_grid, "comma-separated loss levels")->delimiter(',');
    }
    if (needs & kScan) {
        o.h_param = sub.add_option("--h-param", f.h_param, "half-width h of the near-maximal set");
        o.grid_n = sub.add_option("--grid-n", f.grid_n, "lattice resolution (default 512)");
    }
    o.out = sub.add_option("--out", f.out_path, "CSV destination (default standard output)");
    if (needs & kReport) {
        o.report = sub.add_option("--report", f.report_path, "also write the report as JSON to this file");
    }
    return o;
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

// Config file first, then flags on top.
ExperimentConfig resolve(const Flags& f, const Options& o, std::set<std::string>& seen) {
    ExperimentConfig cfg;
    if (given(o.config)) {
        apply_config_file(cfg, f.config_path, &seen);
    }
    try {
        if (given(o.hurst)) {
            cfg.params.hurst = HurstParameter(f.hurst);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("--hurst: ") + e.what());
    }
    if (given(o.horizon)) {
        cfg.params.horizon = f.horizon;
    }
    if (given(o.mu)) {
        cfg.params.mu = f.mu;
    }
    if (given(o.sigma)) {
        cfg.params.sigma = f.sigma;
    }
    if (given(o.n)) {
        cfg.n = f.n;
    }
    if (given(o.reps)) {
        cfg.reps = f.reps;
    }
    if (given(o.seed)) {
        cfg.seed = f.seed;
    }
    if (given(o.method)) {
        cfg.method = parse_sampler_method(f.method);
    }
    if (given(o.x_grid)) {
        cfg.x_grid = f.x_grid;
        seen.insert("x_grid");
    }
    if (!given(o.hurst) && !seen.count("params.hurst")) {
        throw ConfigError("--hurst is required (flag or config file)");
    }
    if (!given(o.horizon) && !seen.count("params.horizon")) {
        throw ConfigError("--horizon is required (flag or config file)");
    }
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::vector<double> default_tail_grid(const ProcessParams& p) {
    // One to nine standard deviations of the endpoint.
    const double unit = p.sigma * std::pow(p.horizon, p.hurst.value());
    std::vector<double> xs;
    for (int k = 0; k <= 32; ++k) {
        xs.push_back(unit * (1.0 + 0.25 * k));
    }
    return xs;
}

void header(std::ostream& out, std::string_view sub, const std::string& config_json) {
    out << "# " << kToolName << ' ' << kToolVersion << ' ' << sub << ' ' << config_json << '\n';
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// Path-level subcommands accept any reps >= 1 and a non-power-of-two grid
// for the non-circulant methods.
void check_path_config(const ExperimentConfig& cfg) {
    if (cfg.n == 0) {
        throw ConfigError("n must be at least 1");
    }
    if (cfg.reps == 0) {
        throw ConfigError("reps must be at least 1");
    }
}

void run_sample(const ExperimentConfig& cfg, std::ostream& out) {
    check_path_config(cfg);
    const TimeGrid grid(cfg.params.horizon, cfg.n);
    const auto sampler = make_sampler(cfg.method, cfg.params.hurst, grid);
    header(out, "sample", config_to_json(cfg));
    out << "path_index,time,value\n";
    for (std::size_t i = 0; i < cfg.reps; ++i) {
        GaussianSource src(SeedSpec{cfg.seed, i});
        const SamplePath p = to_drift_diffusion(sampler->sample(src), cfg.params);
        for (std::size_t k = 0; k < p.size(); ++k) {
            out << i << ',' << fmt(grid.point(k)) << ',' << fmt(p[k]) << '\n';
        }
    }
}

void run_stats(const ExperimentConfig& cfg, std::ostream& out) {
    check_path_config(cfg);
    const TimeGrid grid(cfg.params.horizon, cfg.n);
    std::vector<PathStatistics> stats(cfg.reps);
    for_each_path(cfg, RunOptions{}, [&](std::size_t i, std::span<const double> v) { stats[i] = compute_stats(v); });
    header(out, "stats", config_to_json(cfg));
    out << "path_index,sup,inf,range,max_loss,peak_time,trough_time,peak_index,trough_index\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        out << i << ',' << fmt(s.sup) << ',' << fmt(s.inf) << ',' << fmt(s.range) << ',' << fmt(s.max_loss) << ','
            << fmt(grid.point(s.peak_index)) << ',' << fmt(grid.point(s.trough_index)) << ',' << s.peak_index << ','
            << s.trough_index << '\n';
    }
}

void run_bounds(ExperimentConfig cfg, std::ostream& out) {
    if (cfg.x_grid.empty()) {
        cfg.x_grid = {0.5, 1.0, 2.0, 4.0};
    }
    const auto& p = cfg.params;
    const double t = p.horizon;
    const HurstParameter h = p.hurst;
    // The Theorem-type bounds concern sigma B^H; evaluate them at x / sigma.
    const bool driftless = p.mu == 0.0;
    const bool in_scope = h.in_paper_scope();
    std::optional<ExpectedLossBounds> em;
    if (in_scope) {
        em = expected_maxloss_bounds(t, h);
    }
    header(out, "bounds", config_to_json(cfg));
    out << "x,gaussian_lower,markov_upper,borel_upper,eta,expected_loss_lower,expected_loss_upper,slope,"
           "drift_minimizer,drift_regime,drift_bound\n";
    for (const double x : cfg.x_grid) {
        if (!(x > 0.0)) {
            throw ConfigError("bounds need every x > 0");
        }
        const double y = x / p.sigma;
        std::optional<double> markov, borel, eta, el, eu;
        if (in_scope && driftless) {
            const auto b = tail_bounds(t, h, y);
            markov = b.markov_upper;
            borel = b.borel_upper;
            eta = p.sigma * b.eta;
            el = p.sigma * em->lower;
            eu = p.sigma * em->upper;
        }
        const auto d = drift_minimizer(t, h, p.mu, x, p.sigma);
        const std::optional<double> gaussian =
            driftless ? std::optional<double>(tail_gaussian_lower(t, h, y)) : std::nullopt;
        out << fmt(x) << ',' << fmt(gaussian) << ',' << fmt(markov) << ',' << fmt(borel) << ',' << fmt(eta) << ','
            << fmt(el) << ',' << fmt(eu) << ',' << fmt(asymptotic_slope(t, h, p.sigma)) << ',' << fmt(d.minimizer)
            << ',' << to_string(d.regime) << ',' << fmt(d.bound) << '\n';
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot write '" + path + "'");
    }
    f << text;
}

int run_verify(ExperimentConfig cfg, const Flags& f, std::ostream& out, std::ostream& err) {
    if (cfg.x_grid.empty()) {
        cfg.x_grid = {0.5, 1.0, 2.0, 4.0};
    }
    cfg.validate();
    const auto report = verify_bounds(simulate(cfg));
    header(out, "verify", config_to_json(cfg));
    out << "# grid_bias " << fmt(report.grid_bias) << '\n';
    write_report_csv(out, report);
    if (!f.report_path.empty()) {
        write_file(f.report_path, report_to_json(report, cfg) + "\n");
    }
    err << "verify: " << report.count(Verdict::pass) << " pass, " << report.count(Verdict::fail) << " fail, "
        << report.count(Verdict::inconclusive) << " inconclusive, " << report.count(Verdict::not_applicable)
        << " not applicable\n";
    return report.passed() ? kSuccess : kVerificationFailed;
}

void run_tail_slope(ExperimentConfig cfg, std::ostream& out) {
    if (cfg.x_grid.empty()) {
        cfg.x_grid = default_tail_grid(cfg.params);
    }
    cfg.validate();
    const auto fit = fit_tail_slope(simulate(cfg));
    header(out, "tail-slope", config_to_json(cfg));
    out << "# conclusive " << (fit.conclusive ? "true" : "false") << '\n';
    if (fit.conclusive) {
        out << "# fitted_slope " << fmt(fit.fitted_slope) << '\n'
            << "# intercept " << fmt(fit.intercept) << '\n'
            << "# r_squared " << fmt(fit.r_squared) << '\n'
            << "# fit_window " << fmt(fit.x_min) << ' ' << fmt(fit.x_max) << '\n';
    } else {
        out << "# note " << fit.note << '\n';
    }
    out << "# theory_slope " << fmt(fit.theory_slope) << '\n';
    out << "x,p_hat,exceed_count,pointwise,lower_envelope,upper_envelope,in_fit\n";
    for (const auto& pt : fit.pointwise) {
        out << fmt(pt.x) << ',' << fmt(pt.p_hat) << ',' << pt.exceed_count << ',' << fmt(pt.pointwise) << ','
            << fmt(pt.lower_envelope) << ',' << fmt(pt.upper_envelope) << ',' << (pt.in_fit ? 1 : 0) << '\n';
    }
}

void run_talagrand(ExperimentConfig cfg, std::ostream& out) {
    if (cfg.x_grid.empty()) {
        cfg.x_grid = default_tail_grid(cfg.params);
    }
    cfg.validate();
    if (!cfg.params.is_standard()) {
        throw ConfigError("talagrand needs mu = 0 and sigma = 1");
    }
    const auto curve = talagrand_ratio_curve(simulate(cfg));
    header(out, "talagrand", config_to_json(cfg));
    out << "x,ratio,ci_low,ci_high,reference,exceed_count\n";
    for (const auto& pt : curve) {
        out << fmt(pt.x) << ',' << fmt(pt.ratio) << ',' << fmt(pt.ci_low) << ',' << fmt(pt.ci_high) << ','
            << fmt(pt.reference) << ',' << pt.exceed_count << '\n';
    }
}

int run_th_scan(const ExperimentConfig& cfg, const Flags& f, const Options& o, std::ostream& out) {
    if (!given(o.h_param)) {
        throw ConfigError("--h-param is required");
    }
    const auto r = th_scan(cfg.params.horizon, cfg.params.hurst, f.h_param, f.grid_n);
    nlohmann::ordered_json echo;
    echo["hurst"] = cfg.params.hurst.value();
    echo["horizon"] = cfg.params.horizon;
    echo["h_param"] = f.h_param;
    echo["grid_n"] = f.grid_n;
    header(out, "th-scan", echo.dump());
    out << "horizon,hurst,h_param,grid_n,members,max_gap,k_bound,gap_limit,contained,unique_maximizer,runner_up,"
           "passed\n";
    out << fmt(r.horizon) << ',' << fmt(r.hurst) << ',' << fmt(r.h_param) << ',' << r.grid_n << ','
        << r.members.size() << ',' << fmt(r.max_gap) << ',' << fmt(r.k_bound) << ',' << fmt(r.gap_limit) << ','
        << (r.contained ? "true" : "false") << ',' << (r.unique_maximizer ? "true" : "false") << ','
        << fmt(r.runner_up) << ',' << (r.passed() ? "true" : "false") << '\n';
    return r.passed() ? kSuccess : kVerificationFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional Brownian motion maximum-loss simulation, bounds and verification", "fbmloss"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        unsigned needs;
    };
    const Sub subs[] = {
        {"sample", "simulate paths; CSV of (path_index, time, value)", kProcess | kStochastic},
        {"stats", "per-path sup, inf, range and maximum loss", kProcess | kStochastic},
        {"bounds", "analytic bounds at each x", kProcess | kXGrid},
        {"verify", "Monte Carlo check of the analytic bounds", kProcess | kStochastic | kXGrid | kReport},
        {"tail-slope", "pointwise and fitted tail slope", kProcess | kStochastic | kXGrid},
        {"talagrand", "ratio of the tail to the endpoint normal tail", kProcess | kStochastic | kXGrid},
        {"th-scan", "lattice scan of the near-maximal set", kScan},
    };
    Flags flags;
    std::vector<std::pair<CLI::App*, Options>> registered;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        registered.emplace_back(sub, add_flags(*sub, flags, s.needs));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        for (auto& [sub, opts] : registered) {
            if (!sub->parsed()) {
                continue;
            }
            const std::string name = sub->get_name();
            std::set<std::string> seen;
            const ExperimentConfig cfg = resolve(flags, opts, seen);

            std::ofstream file;
            std::ostream* dest = &out;
            if (!flags.out_path.empty()) {
                file.open(flags.out_path);
                if (!file) {
                    throw ConfigError("cannot write '" + flags.out_path + "'");
                }
                dest = &file;
            }
            if (name == "sample") {
                run_sample(cfg, *dest);
                return kSuccess;
            }
            if (name == "stats") {
                run_stats(cfg, *dest);
                return kSuccess;
            }
            if (name == "bounds") {
                run_bounds(cfg, *dest);
                return kSuccess;
            }
            if (name == "verify") {
                return run_verify(cfg, flags, *dest, err);
            }
            if (name == "tail-slope") {
                run_tail_slope(cfg, *dest);
                return kSuccess;
            }
            if (name == "talagrand") {
                run_talagrand(cfg, *dest);
                return kSuccess;
            }
            return run_th_scan(cfg, flags, opts, *dest);
        }
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const ScopeError& e) {
        err << "out of scope: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        // ConfigError and DomainError
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    }
    return kUsageError;
}

} // namespace fbm::cli
