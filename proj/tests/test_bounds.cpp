#include <doctest.h>

#include "fbmloss/bounds.hpp"
#include "fbmloss/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace fbm;
using doctest::Approx;

namespace {

// Reference values below were computed with 30-digit arithmetic (erfc and
// logs), independent of the code under test.
constexpr double kLower = 0.39894228040143267794;       // sqrt(2) / (2 sqrt(pi))
constexpr double kEta = 1.5957691216057307118;          // 2 sqrt(2) / sqrt(pi)
constexpr double kSqrt2OverPi = 0.79788456080286535588; // sqrt(2 / pi)
constexpr double kPhiBar1 = 0.15865525393145705141;

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

} // namespace

TEST_CASE("normal upper tail against high-precision values") {
    struct Row {
        double x;
        double p;
    };
    const Row rows[] = {
        {0.0, 0.5},
        {0.5, 0.30853753872598689636},
        {1.0, kPhiBar1},
        {2.0, 0.0227501319481792072},
        {5.0, 2.8665157187919391167e-7},
        {7.999, 6.2716859074678364711e-16},
        {8.0, 6.2209605742717841235e-16},
        {8.5, 9.4795348222033183542e-18},
        {10.0, 7.619853024160526066e-24},
        {20.0, 2.7536241186062336951e-89},
        {37.0, 5.7255712225245768227e-300},
    };
    for (const auto& r : rows) {
        CAPTURE(r.x);
        CHECK(close(normal_upper_tail(r.x), r.p, 1e-13));
        CHECK(close(std::exp(log_normal_upper_tail(r.x)), r.p, 1e-12));
    }
    CHECK(close(normal_upper_tail(-1.0), 1.0 - kPhiBar1, 1e-15));
}

TEST_CASE("log normal tail far beyond underflow") {
    CHECK(close(log_normal_upper_tail(10.0), -53.23128515051247057834703, 1e-14));
    CHECK(close(log_normal_upper_tail(100.0), -5005.524208694205088626302, 1e-14));
    CHECK(close(log_normal_upper_tail(1000.0), -500007.8266948121843098062, 1e-14));
    CHECK(close(log_normal_upper_tail(10000.0), -50000010.12927891518085523, 1e-14));
}

TEST_CASE("expected max loss sandwich") {
    const auto b = expected_maxloss_bounds(1.0, HurstParameter(0.5));
    CHECK(close(b.lower, kLower, 1e-15));
    CHECK(close(b.upper, kEta, 1e-15));

    const auto b4 = expected_maxloss_bounds(4.0, HurstParameter(0.5));
    CHECK(close(b4.lower, 2 * kLower, 1e-15));
    CHECK(close(b4.upper, 2 * kEta, 1e-15));

    for (double hv : {0.5, 0.6, 0.75, 0.9, 0.99}) {
        const HurstParameter h(hv);
        const auto one = expected_maxloss_bounds(1.0, h);
        CHECK(one.upper == 4.0 * one.lower);
        CHECK(close(one.lower, kLower, 1e-15));
        double prev = 0.0;
        for (double a : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const auto ba = expected_maxloss_bounds(a, h);
            CHECK(ba.lower > prev);
            CHECK(close(ba.lower, kLower * std::pow(a, hv), 1e-14));
            prev = ba.lower;
        }
    }
    CHECK_THROWS_AS(expected_maxloss_bounds(1.0, HurstParameter(0.4)), ScopeError);
    CHECK_THROWS_AS(expected_maxloss_bounds(0.0, HurstParameter(0.6)), DomainError);
}

TEST_CASE("expected supremum bounds") {
    const auto s = expected_sup_bounds(1.0, HurstParameter(0.5));
    CHECK(close(s.lower, kLower, 1e-15));
    // The upper bound is the exact Brownian E[S_1] from the reflection principle.
    CHECK(close(s.upper, kSqrt2OverPi, 1e-15));
    for (double hv : {0.55, 0.8}) {
        const auto sh = expected_sup_bounds(1.0, HurstParameter(hv));
        CHECK(sh.upper == 2.0 * sh.lower);
    }
    CHECK_THROWS_AS(expected_sup_bounds(1.0, HurstParameter(0.3)), ScopeError);
}

TEST_CASE("Markov tail bound") {
    CHECK(close(tail_markov_upper(1.0, HurstParameter(0.5), 4.0), 0.39894228040143267794, 1e-15));
    CHECK(tail_markov_upper(1.0, HurstParameter(0.5), 1.0) == 1.0);
    CHECK(close(tail_markov_upper_raw(1.0, HurstParameter(0.5), 1.0), kEta, 1e-15));
    CHECK(close(tail_markov_upper(1.0, HurstParameter(0.9), 8.0), 0.19947114020071633897, 1e-15));
}

TEST_CASE("Gaussian lower bound") {
    CHECK(close(tail_gaussian_lower(1.0, HurstParameter(0.5), 1.0), kPhiBar1, 1e-14));
    CHECK(close(tail_gaussian_lower(4.0, HurstParameter(0.5), 2.0), kPhiBar1, 1e-14));
    for (double hv : {0.1, 0.5, 0.9}) {
        CHECK(tail_gaussian_lower(1.0, HurstParameter(hv), 1e-12) == Approx(0.5).epsilon(1e-10));
    }
    CHECK(close(talagrand_reference(1.0, 1.0, HurstParameter(0.5)), kPhiBar1, 1e-14));
    CHECK(talagrand_reference(1e-12, 1.0, HurstParameter(0.5)) == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Borel upper bound") {
    const HurstParameter bm(0.5);
    CHECK(close(tail_borel_upper(1.0, bm, 5.0, kEta), 0.0060891501456865846348, 1e-13));
    CHECK(close(tail_borel_upper(1.0, bm, 5.0), 0.0060891501456865846348, 1e-13));
    CHECK(tail_borel_upper(1.0, bm, kEta + 1e-9) == 1.0);
    CHECK_THROWS_AS(tail_borel_upper(1.0, bm, 1.0), DomainError);
    CHECK_THROWS_AS(tail_borel_upper(1.0, bm, kEta), DomainError);

    // (1/x^2) log of the bound tends to -1/(2 t^{2H}).
    for (double hv : {0.5, 0.7, 0.9}) {
        const HurstParameter h(hv);
        for (double t : {1.0, 3.0}) {
            const double target = -1.0 / (2.0 * std::pow(t, 2 * hv));
            double prev_err = std::numeric_limits<double>::infinity();
            for (double x : {1e2, 1e3, 1e4}) {
                const double err = std::abs(log_tail_borel_upper(t, h, x) / (x * x) - target);
                CHECK(err < prev_err);
                prev_err = err;
            }
            CHECK(prev_err < 1e-3 * std::abs(target));
        }
    }
}

TEST_CASE("asymptotic slope") {
    CHECK(asymptotic_slope(1.0, HurstParameter(0.5)) == -0.5);
    CHECK(asymptotic_slope(1.0, HurstParameter(0.75), 2.0) == -0.125);
    CHECK(asymptotic_slope(4.0, HurstParameter(0.5)) == Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("envelopes are ordered") {
    for (double hv : {0.5, 0.7, 0.9}) {
        const HurstParameter h(hv);
        for (double t : {0.5, 1.0, 2.0}) {
            for (double x = 0.05; x < 12.0; x *= 1.3) {
                const auto b = tail_bounds(t, h, x);
                CHECK(b.gaussian_lower <= b.markov_upper);
                CHECK(b.gaussian_lower >= 0.0);
                CHECK(b.markov_upper <= 1.0);
                if (b.borel_upper) {
                    CHECK(x > b.eta);
                    CHECK(b.gaussian_lower <= *b.borel_upper);
                } else {
                    CHECK(x <= b.eta);
                }
            }
        }
    }
    CHECK_THROWS_AS(tail_bounds(1.0, HurstParameter(0.3), 1.0), ScopeError);
}

TEST_CASE("drift minimizer worked examples") {
    const auto in = drift_minimizer(10.0, HurstParameter(0.5), 1.0, 3.0);
    CHECK(in.regime == DriftRegime::interior);
    REQUIRE(in.v_star);
    CHECK(*in.v_star == Approx(3.0).epsilon(1e-15));
    CHECK(in.minimizer == *in.v_star);

    const auto end = drift_minimizer(1.0, HurstParameter(0.5), 2.0, 3.0);
    CHECK(end.regime == DriftRegime::endpoint_t);
    CHECK(end.minimizer == 1.0);
    CHECK(close(end.bound, 2.8665157187919391167e-7, 1e-13));

    const auto neg = drift_minimizer(1.0, HurstParameter(0.7), -0.5, 2.0);
    CHECK(neg.regime == DriftRegime::endpoint_t);
    CHECK_FALSE(neg.v_star);
    CHECK(neg.minimizer == 1.0);
}

TEST_CASE("drift minimizer with zero drift equals the Gaussian lower bound") {
    for (double hv : {0.5, 0.8}) {
        for (double x : {0.5, 2.0, 6.0}) {
            const auto d = drift_minimizer(2.0, HurstParameter(hv), 0.0, x);
            CHECK(d.bound == tail_gaussian_lower(2.0, HurstParameter(hv), x));
        }
    }
}

TEST_CASE("drift minimizer matches brute-force grid minimisation") {
    struct Case {
        double t, h, mu, x, sigma;
    };
    const Case cases[] = {
        {10.0, 0.5, 1.0, 3.0, 1.0}, {1.0, 0.5, 2.0, 3.0, 1.0}, {1.0, 0.7, -0.5, 2.0, 1.0},
        {5.0, 0.8, 0.4, 0.2, 2.0},  {2.0, 0.6, 3.0, 1.0, 0.5}, {1.0, 0.9, 0.0, 1.0, 1.0},
    };
    constexpr std::size_t kPoints = 1000000;
    for (const auto& c : cases) {
        CAPTURE(c.mu);
        CAPTURE(c.x);
        double best_v = 0.0;
        double best_f = std::numeric_limits<double>::infinity();
        const double dv = c.t / kPoints;
        for (std::size_t i = 1; i <= kPoints; ++i) {
            const double v = (i == kPoints) ? c.t : i * dv;
            const double f = (c.x + c.mu * v) / (c.sigma * std::pow(v, c.h));
            if (f < best_f) {
                best_f = f;
                best_v = v;
            }
        }
        const auto d = drift_minimizer(c.t, HurstParameter(c.h), c.mu, c.x, c.sigma);
        CHECK(std::abs(d.minimizer - best_v) <= dv);
        CHECK(d.f_min <= best_f * (1 + 1e-12));
        CHECK(d.f_min == Approx(best_f).epsilon(1e-9));
    }
}

TEST_CASE("endpoint covariance") {
    for (double hv : {0.3, 0.5, 0.7, 0.9}) {
        const HurstParameter h(hv);
        CHECK(endpoint_covariance(0.0, 2.0, 2.0, h) == Approx(std::pow(2.0, 2 * hv)).epsilon(1e-15));
        CHECK(endpoint_covariance(0.7, 0.7, 2.0, h) == 0.0);
        // Agrees with the covariance formula E[B_t B_v] - E[B_t B_u].
        const double u = 0.3, v = 1.1, t = 1.6;
        CHECK(endpoint_covariance(u, v, t, h) ==
              Approx(fbm_covariance(t, v, h) - fbm_covariance(t, u, h)).epsilon(1e-13));
    }
    CHECK(endpoint_covariance(0.0, 0.5, 1.0, HurstParameter(0.5)) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(endpoint_covariance(0.6, 0.5, 1.0, HurstParameter(0.5)), DomainError);
    CHECK_THROWS_AS(endpoint_covariance(0.0, 1.5, 1.0, HurstParameter(0.5)), DomainError);
}

TEST_CASE("th_scan on the standard lattice") {
    const auto r = th_scan(1.0, HurstParameter(0.5), 0.1, 512);
    CHECK(r.k_bound == Approx(4.0).epsilon(1e-15));
    CHECK(r.gap_limit == Approx(0.04).epsilon(1e-14));
    CHECK(r.passed());
    bool has_corner = false;
    for (const auto& m : r.members) {
        CHECK(m.v >= 1.0 - 0.04);
        if (m.u == 0.0 && m.v == 1.0) {
            has_corner = true;
            CHECK(m.covariance == 1.0);
        }
    }
    CHECK(has_corner);
    // Brute force count at H = 1/2: covariance is v - u.
    std::size_t expected = 0;
    for (std::size_t i = 0; i <= 512; ++i) {
        for (std::size_t j = i; j <= 512; ++j) {
            expected += (double(j) - double(i)) / 512.0 >= 1.0 - 0.01 - 1e-15;
        }
    }
    CHECK(r.members.size() == expected);
}

TEST_CASE("th_scan with tiny h keeps only the corner and its neighbours") {
    const auto r = th_scan(1.0, HurstParameter(0.7), 1e-3, 512);
    CHECK(r.passed());
    REQUIRE_FALSE(r.members.empty());
    for (const auto& m : r.members) {
        CHECK(m.u <= 1.0 / 512);
        CHECK(m.v >= 1.0 - 1.0 / 512);
    }
}

TEST_CASE("th_scan passes across the acceptance grid") {
    for (double hv : {0.5, 0.7}) {
        for (double hp : {0.05, 0.1, 0.2}) {
            const auto r = th_scan(1.0, HurstParameter(hv), hp, 512);
            CAPTURE(hv);
            CAPTURE(hp);
            CHECK(r.unique_maximizer);
            CHECK(r.contained);
            CHECK(r.max_gap <= r.gap_limit);
            CHECK(r.runner_up < 1.0);
        }
    }
    CHECK_THROWS_AS(th_scan(1.0, HurstParameter(0.5), 0.1, 8), DomainError);
    CHECK_THROWS_AS(th_scan(1.0, HurstParameter(0.5), 0.8, 64), DomainError);
}
