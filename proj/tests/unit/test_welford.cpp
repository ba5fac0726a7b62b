#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"
#include "parascope/welford.hpp"

using namespace parascope;

TEST_CASE("first sample sets the mean with zero spread") {
    NormStats s(4);
    std::vector<float> v = {1.0f, -2.0f, 0.5f, 100.0f};
    s.update(std::span<const float>(v));
    CHECK(s.count == 1);
    for (size_t i = 0; i < v.size(); ++i) {
        CHECK(s.mean[i] == doctest::Approx(static_cast<double>(v[i])));
        CHECK(s.m2[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("constant samples give zero variance and epsilon std") {
    NormStats s(3);
    std::vector<float> v = {2.5f, -1.0f, 0.0f};
    for (int i = 0; i < 50; ++i) s.update(std::span<const float>(v));
    for (double var : s.variance()) CHECK(var == doctest::Approx(0.0));
    for (double sd : s.std()) CHECK(sd == doctest::Approx(s.epsilon));
    // Normalizing anything stays finite thanks to the epsilon guard.
    std::vector<float> probe = {1e6f, 1e6f, 1e6f};
    for (float x : s.normalize(std::span<const float>(probe))) CHECK(std::isfinite(x));
}

TEST_CASE("streaming moments match a two-pass computation") {
    // Independent oracle: accumulate sums and squared deviations in two passes.
    const int n = 20000;
    const int d = 8;
    Rng rng = make_rng(11);
    std::normal_distribution<double> base(3.0, 2.0);
    std::vector<std::vector<float>> samples(n, std::vector<float>(d));
    for (auto& row : samples)
        for (float& x : row) x = static_cast<float>(base(rng) * 0.5 + base(rng));

    NormStats s(d);
    for (const auto& row : samples) s.update(std::span<const float>(row));

    for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const auto& row : samples) sum += row[static_cast<size_t>(j)];
        double mean = sum / n;
        double ssd = 0.0;
        for (const auto& row : samples) {
            double dlt = row[static_cast<size_t>(j)] - mean;
            ssd += dlt * dlt;
        }
        double var = ssd / (n - 1);
        CHECK(std::abs(s.mean[static_cast<size_t>(j)] - mean) <= 1e-5 * std::abs(mean));
        CHECK(std::abs(s.variance()[static_cast<size_t>(j)] - var) <= 1e-5 * var);
    }
}

TEST_CASE("normalization re-standardizes the fitted sample") {
    const int n = 5000;
    const int d = 6;
    Rng rng = make_rng(23);
    std::normal_distribution<double> base(0.0, 1.0);
    std::vector<std::vector<float>> samples(n, std::vector<float>(d));
    for (auto& row : samples)
        for (size_t j = 0; j < row.size(); ++j)
            row[j] = static_cast<float>(base(rng) * (1.0 + static_cast<double>(j)) + 10.0 * static_cast<double>(j));

    NormStats s(d);
    for (const auto& row : samples) s.update(std::span<const float>(row));

    std::vector<double> mean_out(d, 0.0), var_out(d, 0.0);
    for (const auto& row : samples) {
        auto z = s.normalize(std::span<const float>(row));
        for (int j = 0; j < d; ++j) mean_out[static_cast<size_t>(j)] += z[static_cast<size_t>(j)];
    }
    for (double& m : mean_out) m /= n;
    for (const auto& row : samples) {
        auto z = s.normalize(std::span<const float>(row));
        for (int j = 0; j < d; ++j) {
            double dlt = z[static_cast<size_t>(j)] - mean_out[static_cast<size_t>(j)];
            var_out[static_cast<size_t>(j)] += dlt * dlt;
        }
    }
    for (int j = 0; j < d; ++j) {
        CHECK(std::abs(mean_out[static_cast<size_t>(j)]) < 0.02);
        CHECK(std::sqrt(var_out[static_cast<size_t>(j)] / (n - 1)) == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("denormalize inverts normalize") {
    NormStats s(5);
    Rng rng = make_rng(5);
    std::normal_distribution<double> base(1.0, 4.0);
    std::vector<float> row(5);
    for (int i = 0; i < 100; ++i) {
        for (float& x : row) x = static_cast<float>(base(rng));
        s.update(std::span<const float>(row));
    }
    std::vector<float> v = {0.25f, -3.5f, 7.0f, 0.0f, 42.0f};
    auto back = s.denormalize(std::span<const float>(s.normalize(std::span<const float>(v))));
    for (size_t i = 0; i < v.size(); ++i)
        CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-5));
}

TEST_CASE("stats reject bad input") {
    NormStats s(3);
    std::vector<float> wrong = {1.0f, 2.0f};
    CHECK_THROWS_AS(s.update(std::span<const float>(wrong)), StatsError);
    std::vector<float> bad = {1.0f, std::nanf(""), 2.0f};
    CHECK_THROWS_AS(s.update(std::span<const float>(bad)), StatsError);
    std::vector<float> ok = {1.0f, 2.0f, 3.0f};
    CHECK_THROWS_AS(s.normalize(std::span<const float>(ok)), StatsError);  // count < 2
    s.update(std::span<const float>(ok));
    CHECK_THROWS_AS(s.normalize(std::span<const float>(ok)), StatsError);  // still count < 2
    CHECK_THROWS_AS(NormStats(0), StatsError);
}

TEST_CASE("stats serialize and reload exactly") {
    NormStats s(4);
    Rng rng = make_rng(77);
    std::normal_distribution<double> base(0.0, 3.0);
    std::vector<float> row(4);
    for (int i = 0; i < 257; ++i) {
        for (float& x : row) x = static_cast<float>(base(rng));
        s.update(std::span<const float>(row));
    }
    NormStats t = NormStats::from_json(s.to_json());
    CHECK(t.count == s.count);
    CHECK(t.epsilon == s.epsilon);
    for (size_t i = 0; i < s.mean.size(); ++i) {
        CHECK(t.mean[i] == s.mean[i]);
        CHECK(t.m2[i] == s.m2[i]);
    }
}
