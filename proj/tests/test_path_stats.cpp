#include <doctest.h>

#include "fbmloss/errors.hpp"
#include "fbmloss/path_stats.hpp"
#include "fbmloss/samplers.hpp"
#include "ks.hpp"

#include <cmath>
#include <vector>

using namespace fbm;

namespace {

struct Brute {
    double loss = 0.0;
    std::size_t peak = 0;
    std::size_t trough = 0;
};

// O(n^2) enumeration of all pairs u <= v, earliest pair on ties.
Brute brute_force(std::span<const double> v) {
    Brute b;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i; j < v.size(); ++j) {
            if (v[i] - v[j] > b.loss) {
                b = {v[i] - v[j], i, j};
            }
        }
    }
    return b;
}

} // namespace

TEST_CASE("worked example") {
    const SamplePath p(TimeGrid(4.0, 4), {0.0, 1.0, 0.5, 2.0, -1.0});
    const auto s = compute_stats(p);
    CHECK(s.sup == 2.0);
    CHECK(s.inf == -1.0);
    CHECK(s.range == 3.0);
    CHECK(s.max_loss == 3.0);
    CHECK(s.peak_index == 3);
    CHECK(s.trough_index == 4);
    CHECK(s.peak_time == 3.0);
    CHECK(s.trough_time == 4.0);

    const auto ls = loss_series(p);
    CHECK(ls.x == std::vector<double>{0.0, 0.0, 0.5, 0.0, 3.0});
}

TEST_CASE("monotone paths") {
    const SamplePath up(TimeGrid(1.0, 3), {0.0, 1.0, 2.0, 3.0});
    CHECK(compute_stats(up).max_loss == 0.0);
    for (double x : loss_series(up).x) {
        CHECK(x == 0.0);
    }

    const SamplePath down(TimeGrid(1.0, 2), {0.0, -1.0, -2.0});
    const auto s = compute_stats(down);
    CHECK(s.max_loss == 2.0);
    CHECK(s.max_loss == -s.inf);
    CHECK(s.max_loss == s.range);
}

TEST_CASE("ties report the earliest pair") {
    const std::vector<double> v{0.0, 1.0, 0.0, 1.0, 0.0};
    const auto s = compute_stats(v);
    CHECK(s.max_loss == 1.0);
    CHECK(s.peak_index == 1);
    CHECK(s.trough_index == 2);
}

TEST_CASE("unanchored paths are rejected") {
    const auto price = to_price_path(SamplePath::zeros(TimeGrid(1.0, 2)), 1.0, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(compute_stats(price), DomainError);
}

TEST_CASE("single pass agrees with brute force on random paths") {
    GaussianSource src(SeedSpec{99, 0});
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(src.next_uniform() * 64);
        std::vector<double> v(n + 1, 0.0);
        for (std::size_t i = 1; i <= n; ++i) {
            // Coarse rounding makes ties common.
            v[i] = v[i - 1] + std::round(src.next() * 2.0) / 2.0;
        }
        const auto s = compute_stats(v);
        const auto b = brute_force(v);
        CAPTURE(rep);
        REQUIRE(s.max_loss == b.loss);
        CHECK(max_loss(v) == b.loss);
        CHECK(s.peak_index == b.peak);
        CHECK(s.trough_index == b.trough);
        CHECK(v[s.peak_index] - v[s.trough_index] == s.max_loss);
        CHECK(-s.inf <= s.max_loss);
        CHECK(s.max_loss <= s.range);
        CHECK(s.range == s.sup - s.inf);

        const auto ls = loss_series(SamplePath(TimeGrid(1.0, n), v));
        double top = 0.0;
        for (double x : ls.x) {
            CHECK(x >= 0.0);
            top = std::max(top, x);
        }
        CHECK(ls.x.front() == 0.0);
        CHECK(top == s.max_loss);
    }
}

TEST_CASE("max loss scales with the self-similarity map") {
    const HurstParameter h(0.7);
    const TimeGrid g(1.0, 128);
    const HoskingSampler sampler(h, g);
    for (std::uint64_t i = 0; i < 50; ++i) {
        GaussianSource src(SeedSpec{3, i});
        const SamplePath p = sampler.sample(src);
        const double c = 2.5;
        const double m = compute_stats(p).max_loss;
        const double mc = compute_stats(rescale_path(p, c, h)).max_loss;
        CHECK(mc == doctest::Approx(std::pow(c, 0.7) * m).epsilon(1e-13));
    }
}

TEST_CASE("time reversal of the negated path preserves max loss") {
    // M(B) = M(t -> B_{t} reversed and negated, re-anchored at zero).
    GaussianSource src(SeedSpec{4, 0});
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> v(33, 0.0);
        for (std::size_t i = 1; i < v.size(); ++i) {
            v[i] = v[i - 1] + src.next();
        }
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            r[i] = v.back() - v[v.size() - 1 - i];
        }
        CHECK(max_loss(r) == doctest::Approx(max_loss(v)).epsilon(1e-13));
    }
}

TEST_CASE("loss at a fixed time has the law of the running supremum") {
    const HurstParameter h(0.7);
    const TimeGrid g(1.0, 256);
    const CirculantSampler sampler(h, g);
    std::vector<double> loss_at_v;
    std::vector<double> sup_at_v;
    std::vector<double> values(g.size());
    const std::size_t v_index = 256;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        GaussianSource src(SeedSpec{11, i});
        sampler.sample_into(values, src);
        // X_v from one half of the sample, S_v from the other, so the two
        // samples are independent.
        if (i % 2 == 0) {
            double peak = 0.0;
            for (std::size_t k = 0; k <= v_index; ++k) {
                peak = std::max(peak, values[k]);
            }
            loss_at_v.push_back(peak - values[v_index]);
        } else {
            double sup = 0.0;
            for (std::size_t k = 0; k <= v_index; ++k) {
                sup = std::max(sup, values[k]);
            }
            sup_at_v.push_back(sup);
        }
    }
    CHECK(testing::ks_two_sample(loss_at_v, sup_at_v).p_value > 0.01);
}
