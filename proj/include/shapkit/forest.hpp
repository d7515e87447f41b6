#pragma once

#include <cstdint>
#include <vector>

#include "shapkit/blackbox.hpp"
#include "shapkit/dataset.hpp"

namespace shapkit {

/// Probability vector over feature indices used for biased subset sampling.
struct FeatureDistribution {
    std::vector<double> probabilities;

    std::size_t size() const { return probabilities.size(); }
    bool valid(double tol = 1e-12) const;
    std::size_t argmax() const;
};

FeatureDistribution uniform_distribution(std::size_t m);

// Softmax smoothing p*_k = exp(p_k/T) / sum_i exp(p_i/T); argmax-preserving.
FeatureDistribution temperature_scale(const FeatureDistribution& p, double temperature);

struct TreeNode {
    int split_feature = -1;   // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
    double impurity = 0.0;
    std::size_t sample_count = 0;

    bool is_leaf() const { return split_feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root

    double predict_one(const FeatureVector& x) const;
};

enum class ImpurityKind { Gini, Variance };

struct ForestConfig {
    std::size_t tree_count = 10;
    std::size_t max_depth = 0;          // 0 = unbounded
    std::size_t features_per_split = 0; // 0 = ceil(sqrt(m))
    bool bootstrap = true;
    ImpurityKind impurity = ImpurityKind::Variance;
    std::uint64_t seed = 0;
};

/// From-scratch CART forest; doubles as a black-box model.
/// Prediction is the arithmetic mean of the trees' leaf values.
class RandomForest final : public BlackBoxModel {
public:
    RandomForest(std::vector<DecisionTree> trees, std::size_t feature_count,
                 ForestConfig config);

    std::size_t feature_count() const override { return feature_count_; }
    std::vector<double> predict(const Matrix& batch) const override;

    const std::vector<DecisionTree>& trees() const { return trees_; }
    const ForestConfig& config() const { return config_; }

private:
    std::vector<DecisionTree> trees_;
    std::size_t feature_count_;
    ForestConfig config_;
};

RandomForest fit_forest(const Dataset& data, const ForestConfig& config);

// Mean over trees of the sample-weighted impurity decrease per feature,
// normalized to sum to 1; uniform fallback when all raw importances are 0.
FeatureDistribution impurity_importance(const RandomForest& forest);

}  // namespace shapkit
