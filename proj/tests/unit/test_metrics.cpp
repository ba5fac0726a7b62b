#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/metrics.hpp"
#include "parascope/util.hpp"

using namespace parascope;

namespace {

std::span<const double> ds(const std::vector<double>& v) { return {v.data(), v.size()}; }
std::span<const float> fs(const std::vector<float>& v) { return {v.data(), v.size()}; }

// Independent oracle: O(n^2) pair walk straight from the tau-b definition.
std::optional<double> brute_force_tau(const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
    const size_t n = xs.size();
    double concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            if (dx == 0 && dy == 0) {
                ++tied_x;
                ++tied_y;
            } else if (dx == 0) {
                ++tied_x;
            } else if (dy == 0) {
                ++tied_y;
            } else if (dx * dy > 0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n * (n - 1) / 2);
    const double denom = std::sqrt((n0 - tied_x) * (n0 - tied_y));
    if (denom == 0.0) return std::nullopt;
    return (concordant - discordant) / denom;
}

}  // namespace

TEST_CASE("cosine basics: self, symmetry, orthogonality, scale invariance") {
    std::vector<float> a = {1.0f, 2.0f, -3.0f};
    std::vector<float> b = {0.5f, -1.0f, 2.0f};
    CHECK(cosine(fs(a), fs(a)) == doctest::Approx(1.0));
    CHECK(cosine(fs(a), fs(b)) == doctest::Approx(cosine(fs(b), fs(a))));

    std::vector<float> ex = {1.0f, 0.0f};
    std::vector<float> ey = {0.0f, 1.0f};
    CHECK(cosine(fs(ex), fs(ey)) == doctest::Approx(0.0));

    std::vector<float> a2 = {2.0f, 4.0f, -6.0f};
    CHECK(cosine(fs(a), fs(a2)) == doctest::Approx(1.0));
    std::vector<float> neg = {-1.0f, -2.0f, 3.0f};
    CHECK(cosine(fs(a), fs(neg)) == doctest::Approx(-1.0));
}

TEST_CASE("cosine edge cases: zero vectors, mismatch, non-finite") {
    std::vector<float> z = {0.0f, 0.0f};
    std::vector<float> a = {1.0f, 1.0f};
    CHECK(cosine(fs(z), fs(a)) == 0.0);
    CHECK(cosine(fs(z), fs(z)) == 0.0);

    std::vector<float> shorter = {1.0f};
    CHECK_THROWS_AS(cosine(fs(a), fs(shorter)), EvalError);

    std::vector<float> bad = {1.0f, std::numeric_limits<float>::quiet_NaN()};
    CHECK_THROWS_AS(cosine(fs(a), fs(bad)), EvalError);
}

TEST_CASE("mean and sample std against hand-computed values") {
    std::vector<double> xs = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    CHECK(mean_of(ds(xs)) == doctest::Approx(5.0));
    // Sum of squared deviations is 32; n-1 = 7.
    CHECK(sample_std(ds(xs)) == doctest::Approx(std::sqrt(32.0 / 7.0)));

    std::vector<double> one = {3.0};
    CHECK(sample_std(ds(one)) == 0.0);
    std::vector<double> none;
    CHECK_THROWS_AS(mean_of(ds(none)), EvalError);
}

TEST_CASE("kendall tau on clean monotone lists") {
    std::vector<double> up = {1, 2, 3, 4, 5};
    std::vector<double> down = {5, 4, 3, 2, 1};
    CHECK(kendall_tau(ds(up), ds(up)) == doctest::Approx(1.0));
    CHECK(kendall_tau(ds(up), ds(down)) == doctest::Approx(-1.0));

    // One swapped adjacent pair out of 10: (C - D)/n0 = (9 - 1)/10.
    std::vector<double> swapped = {1, 2, 4, 3, 5};
    CHECK(kendall_tau(ds(up), ds(swapped)) == doctest::Approx(0.8));
}

TEST_CASE("kendall tau matches the O(n^2) definition on random lists with ties") {
    Rng rng = make_rng(20260813);
    std::uniform_int_distribution<int> len(2, 8);
    std::uniform_int_distribution<int> value(0, 3);  // small range forces ties
    int degenerate_seen = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = len(rng);
        std::vector<double> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            xs[static_cast<size_t>(i)] = value(rng);
            ys[static_cast<size_t>(i)] = value(rng);
        }
        std::optional<double> expected = brute_force_tau(xs, ys);
        if (!expected) {
            ++degenerate_seen;
            CHECK_THROWS_AS(kendall_tau(ds(xs), ds(ys)), EvalError);
            continue;
        }
        CHECK(kendall_tau(ds(xs), ds(ys)) == doctest::Approx(*expected).epsilon(1e-12));
    }
    // The value range is small enough that fully tied lists must have occurred.
    CHECK(degenerate_seen > 0);
}

TEST_CASE("kendall tau input validation") {
    std::vector<double> a = {1, 2, 3};
    std::vector<double> b = {1, 2};
    CHECK_THROWS_AS(kendall_tau(ds(a), ds(b)), EvalError);
    std::vector<double> single = {1};
    CHECK_THROWS_AS(kendall_tau(ds(single), ds(single)), EvalError);
    std::vector<double> flat = {2, 2, 2};
    CHECK_THROWS_AS(kendall_tau(ds(flat), ds(a)), EvalError);
    std::vector<double> inf = {1, std::numeric_limits<double>::infinity(), 3};
    CHECK_THROWS_AS(kendall_tau(ds(a), ds(inf)), EvalError);
}

TEST_CASE("paired bootstrap recovers an injected shift") {
    Rng rng = make_rng(99);
    std::normal_distribution<double> noise(0.0, 0.1);
    const double shift = 0.5;
    std::vector<double> a(200), b(200);
    for (size_t i = 0; i < a.size(); ++i) {
        const double base = noise(rng);
        b[i] = base + noise(rng);
        a[i] = base + shift + noise(rng);
    }
    BootstrapResult r = paired_bootstrap_diff(ds(a), ds(b), 2000, 7);
    CHECK(r.mean_diff == doctest::Approx(shift).epsilon(0.1));
    CHECK(r.lo <= r.mean_diff);
    CHECK(r.mean_diff <= r.hi);
    CHECK(r.lo > 0.0);  // interval excludes zero for a real shift

    // Exact mean: the point estimate never depends on the resampling.
    double manual = 0.0;
    for (size_t i = 0; i < a.size(); ++i) manual += a[i] - b[i];
    manual /= static_cast<double>(a.size());
    CHECK(r.mean_diff == doctest::Approx(manual).epsilon(1e-12));

    BootstrapResult again = paired_bootstrap_diff(ds(a), ds(b), 2000, 7);
    CHECK(again.lo == r.lo);
    CHECK(again.hi == r.hi);
}

TEST_CASE("paired bootstrap interval straddles zero for identical inputs") {
    Rng rng = make_rng(4);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a(100), b(100);
    for (size_t i = 0; i < a.size(); ++i) {
        a[i] = noise(rng);
        b[i] = noise(rng);
    }
    BootstrapResult r = paired_bootstrap_diff(ds(a), ds(a), 500, 3);
    CHECK(r.mean_diff == 0.0);
    CHECK(r.lo == 0.0);
    CHECK(r.hi == 0.0);

    CHECK_THROWS_AS(paired_bootstrap_diff(ds(a), ds(b), 5, 1), EvalError);
    CHECK_THROWS_AS(paired_bootstrap_diff(ds(a), ds(b), 500, 1, 1.5), EvalError);
    std::vector<double> mismatched = {1.0};
    CHECK_THROWS_AS(paired_bootstrap_diff(ds(a), ds(mismatched), 500, 1), EvalError);
}

TEST_CASE("threshold fraction reports both denominator conventions") {
    // values: two sentinels, four counted, three of them >= 2.
    std::vector<int> values = {-1, 3, 2, 0, -1, 4};
    ThresholdFraction f = threshold_fraction(values, 2);
    CHECK(f.counted == 4);
    CHECK(f.excluded == 2);
    CHECK(f.fraction_excluding == doctest::Approx(3.0 / 4.0));
    CHECK(f.fraction_including == doctest::Approx(3.0 / 6.0));

    // Raising the threshold never raises either fraction.
    double prev_ex = 1.0, prev_in = 1.0;
    for (int t = 0; t <= 5; ++t) {
        ThresholdFraction g = threshold_fraction(values, t);
        CHECK(g.fraction_excluding <= prev_ex);
        CHECK(g.fraction_including <= prev_in);
        prev_ex = g.fraction_excluding;
        prev_in = g.fraction_including;
    }

    std::vector<int> all_sentinel = {-1, -1};
    ThresholdFraction h = threshold_fraction(all_sentinel, 1);
    CHECK(h.counted == 0);
    CHECK(h.fraction_excluding == 0.0);
    CHECK(h.fraction_including == 0.0);

    std::vector<int> empty;
    CHECK_THROWS_AS(threshold_fraction(empty, 1), EvalError);
}
