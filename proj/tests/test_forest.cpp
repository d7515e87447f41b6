#include <doctest.h>

#include <cmath>

#include "shapkit/forest.hpp"
#include "shapkit/rng.hpp"

using namespace shapkit;

namespace {

Dataset threshold_1d(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed, "test-1d");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Dataset data;
    std::vector<double> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = unit(rng);
        data.features.push_back({x});
        labels.push_back(x > 0.0 ? 1.0 : 0.0);
    }
    data.names = {"x1"};
    data.labels = labels;
    return data;
}

// 5 features, label decided by feature 0 alone.
Dataset one_informative(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed, "test-informative");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Dataset data;
    std::vector<double> labels;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector row(5);
        for (auto& v : row) v = unit(rng);
        labels.push_back(row[0] > 0.0 ? 1.0 : 0.0);
        data.features.push_back(std::move(row));
    }
    for (int j = 1; j <= 5; ++j) data.names.push_back("x" + std::to_string(j));
    data.labels = labels;
    return data;
}

}  // namespace

TEST_CASE("forest learns a 1D threshold") {
    const Dataset data = threshold_1d(100, 7);
    ForestConfig config;
    config.tree_count = 10;
    config.impurity = ImpurityKind::Gini;
    config.seed = 7;
    const RandomForest forest = fit_forest(data, config);
    std::size_t correct = 0;
    const auto scores = forest.predict(data.features);
    for (std::size_t i = 0; i < scores.size(); ++i)
        if ((scores[i] > 0.5 ? 1.0 : 0.0) == (*data.labels)[i]) ++correct;
    CHECK(static_cast<double>(correct) / 100.0 >= 0.95);
}

TEST_CASE("constant labels collapse to single-leaf trees") {
    Dataset data = threshold_1d(30, 1);
    data.labels = std::vector<double>(30, 3.5);
    ForestConfig config;
    config.seed = 2;
    const RandomForest forest = fit_forest(data, config);
    for (const auto& tree : forest.trees()) {
        CHECK(tree.nodes.size() == 1);
        CHECK(tree.nodes.front().leaf_value == 3.5);
    }
}

TEST_CASE("depth limit 1 bounds every tree to 3 nodes") {
    const Dataset data = one_informative(200, 3);
    ForestConfig config;
    config.max_depth = 1;
    config.impurity = ImpurityKind::Gini;
    config.seed = 3;
    const RandomForest forest = fit_forest(data, config);
    for (const auto& tree : forest.trees()) CHECK(tree.nodes.size() <= 3);
}

TEST_CASE("forest prediction is the exact mean of its trees") {
    const Dataset data = one_informative(150, 5);
    ForestConfig config;
    config.seed = 5;
    const RandomForest forest = fit_forest(data, config);
    const FeatureVector x = {0.2, -0.3, 0.1, 0.9, -0.5};
    double sum = 0.0;
    for (const auto& tree : forest.trees()) sum += tree.predict_one(x);
    CHECK(forest.predict_one(x) == sum / static_cast<double>(forest.trees().size()));
}

TEST_CASE("seed determinism of fit_forest") {
    const Dataset data = one_informative(120, 6);
    ForestConfig config;
    config.seed = 99;
    const RandomForest a = fit_forest(data, config);
    const RandomForest b = fit_forest(data, config);
    REQUIRE(a.trees().size() == b.trees().size());
    for (std::size_t k = 0; k < a.trees().size(); ++k) {
        const auto& ta = a.trees()[k].nodes;
        const auto& tb = b.trees()[k].nodes;
        REQUIRE(ta.size() == tb.size());
        for (std::size_t i = 0; i < ta.size(); ++i) {
            CHECK(ta[i].split_feature == tb[i].split_feature);
            CHECK(ta[i].threshold == tb[i].threshold);
            CHECK(ta[i].leaf_value == tb[i].leaf_value);
        }
    }
}

TEST_CASE("impurity importance falls back to uniform for degenerate forests") {
    Dataset data = threshold_1d(30, 1);
    data.features.clear();
    for (int i = 0; i < 30; ++i) data.features.push_back({0.1, 0.2, 0.3});
    data.names = {"a", "b", "c"};
    data.labels = std::vector<double>(30, 1.0);
    ForestConfig config;
    config.seed = 4;
    const FeatureDistribution p = impurity_importance(fit_forest(data, config));
    for (double v : p.probabilities) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("informative feature dominates importance across seeds") {
    std::size_t wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Dataset data = one_informative(200, seed);
        ForestConfig config;
        config.impurity = ImpurityKind::Gini;
        config.seed = seed;
        const FeatureDistribution p = impurity_importance(fit_forest(data, config));
        CHECK(p.valid());
        if (p.argmax() == 0) ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("temperature scaling") {
    const FeatureDistribution p{{0.7, 0.2, 0.1}};

    SUBCASE("large T approaches the uniform distribution") {
        for (double v : temperature_scale(p, 1e6).probabilities)
            CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    }

    SUBCASE("argmax is preserved for any T > 0") {
        for (double T : {0.05, 0.1, 0.5, 1.0, 10.0, 1000.0})
            CHECK(temperature_scale(p, T).argmax() == 0);
    }

    SUBCASE("T = 1 matches an independent softmax evaluation") {
        double denom = 0.0;
        for (double v : p.probabilities) denom += std::exp(v);
        const FeatureDistribution scaled = temperature_scale(p, 1.0);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(scaled.probabilities[i] ==
                  doctest::Approx(std::exp(p.probabilities[i]) / denom).epsilon(1e-14));
    }

    SUBCASE("valid distributions map to valid distributions") {
        for (double T : {0.1, 0.5, 1.0, 10.0}) CHECK(temperature_scale(p, T).valid());
    }

    SUBCASE("non-positive T is rejected") {
        CHECK_THROWS_AS(temperature_scale(p, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(temperature_scale(p, -1.0), std::invalid_argument);
    }
}
