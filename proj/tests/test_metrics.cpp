#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "shapkit/metrics.hpp"
#include "shapkit/rng.hpp"

using namespace shapkit;

TEST_CASE("concordance on canonical rankings") {
    CHECK(concordance_index({0.1, 0.5, 0.3}, {0.1, 0.5, 0.3}) == 1.0);
    CHECK(concordance_index({1, 2, 3}, {3, 2, 1}) == 0.0);
    CHECK(concordance_index({1, 2, 3}, {1, 3, 2}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("concordance input validation") {
    CHECK_THROWS_AS(concordance_index({1, 2}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(concordance_index({1}, {1}), std::invalid_argument);
}

TEST_CASE("concordance is invariant under strictly increasing transforms") {
    const std::vector<double> a = {0.3, -1.2, 0.9, 0.0, 2.1};
    const std::vector<double> b = {1.0, 0.5, 0.7, -0.3, 0.8};
    const double c = concordance_index(a, b);
    std::vector<double> b_mapped(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) b_mapped[i] = std::exp(3.0 * b[i]) + 7.0;
    CHECK(concordance_index(a, b_mapped) == c);
}

TEST_CASE("normalized euclidean on canonical vectors") {
    CHECK(normalized_euclidean({0, 0.5, 1}, {0, 0.5, 1}) == 0.0);
    CHECK(normalized_euclidean({0, 1}, {1, 0}) == doctest::Approx(1.0));
    CHECK(normalized_euclidean({0, 0.5, 1}, {0, 1, 0.5}) ==
          doctest::Approx(std::sqrt(0.5) / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("normalized euclidean absorbs positive affine rescaling") {
    const std::vector<double> a = {0.3, -1.2, 0.9, 0.0};
    const std::vector<double> b = {1.0, 0.5, 0.7, -0.3};
    const double e = normalized_euclidean(a, b);
    std::vector<double> b_scaled(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) b_scaled[i] = 4.5 * b[i] - 2.0;
    CHECK(normalized_euclidean(a, b_scaled) == doctest::Approx(e).epsilon(1e-14));
}

TEST_CASE("constant vectors map to all-0.5 instead of failing") {
    const double e = normalized_euclidean({2, 2, 2}, {0, 1, 2});
    CHECK(e == doctest::Approx(std::sqrt(0.25 + 0.0 + 0.25) / std::sqrt(3.0)));
}

TEST_CASE("metrics stay in their ranges on random pairs") {
    auto rng = make_rng(0, "metric-bounds");
    std::uniform_real_distribution<double> unit(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 9);
        std::vector<double> a(m), b(m);
        for (auto& v : a) v = unit(rng);
        for (auto& v : b) v = unit(rng);
        const ComparisonResult cmp = compare_attributions(a, b);
        CHECK(cmp.concordance >= 0.0);
        CHECK(cmp.concordance <= 1.0);
        CHECK(cmp.euclidean >= 0.0);
        CHECK(cmp.euclidean <= 1.0);
        CHECK(cmp.concordant + cmp.discordant + cmp.tied == m * (m - 1) / 2);
    }
}

TEST_CASE("cost ratios") {
    const auto [calls, time] = cost_ratio(800, 10.0, 8192, 100.0);
    CHECK(calls == doctest::Approx(800.0 / 8192.0));
    CHECK(time == doctest::Approx(0.1));
    CHECK_THROWS_AS(cost_ratio(1, 1.0, 0, 1.0), std::invalid_argument);

    const auto [same_calls, same_time] = cost_ratio(100, 5.0, 100, 5.0);
    CHECK(same_calls == 1.0);
    CHECK(same_time == 1.0);
}

TEST_CASE("comparison result CSV row shape") {
    ComparisonResult cmp = compare_attributions({1, 2, 3}, {1, 3, 2});
    cmp.call_ratio = 0.5;
    cmp.time_ratio = 0.25;
    const std::string row = cmp.to_csv_row();
    std::size_t commas = 0;
    for (char c : row)
        if (c == ',') ++commas;
    CHECK(commas == 6);
}
