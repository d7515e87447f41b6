#include "shapkit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "shapkit/rng.hpp"

namespace shapkit {

bool FeatureDistribution::valid(double tol) const {
    double sum = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::size_t FeatureDistribution::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(probabilities.begin(), probabilities.end()) -
        probabilities.begin());
}

FeatureDistribution uniform_distribution(std::size_t m) {
    return {std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

FeatureDistribution temperature_scale(const FeatureDistribution& p, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("temperature_scale: T must be > 0");
    const double max_p = *std::max_element(p.probabilities.begin(), p.probabilities.end());
    std::vector<double> scaled(p.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        scaled[i] = std::exp((p.probabilities[i] - max_p) / temperature);
        sum += scaled[i];
    }
    for (auto& v : scaled) v /= sum;
    return {std::move(scaled)};
}

double DecisionTree::predict_one(const FeatureVector& x) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
        const auto& node = nodes[static_cast<std::size_t>(idx)];
        idx = x[static_cast<std::size_t>(node.split_feature)] <= node.threshold
                  ? node.left
                  : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].leaf_value;
}

namespace {

double node_impurity(ImpurityKind kind, const std::vector<double>& labels,
                     const std::vector<std::size_t>& idx) {
    const double n = static_cast<double>(idx.size());
    if (idx.empty()) return 0.0;
    if (kind == ImpurityKind::Gini) {
        // Labels are class indices; Gini over observed classes.
        double sum1 = 0.0;
        std::vector<std::pair<double, std::size_t>> counts;
        for (std::size_t i : idx) {
            bool found = false;
            for (auto& [cls, cnt] : counts) {
                if (cls == labels[i]) { ++cnt; found = true; break; }
            }
            if (!found) counts.emplace_back(labels[i], 1);
        }
        for (const auto& [cls, cnt] : counts) {
            const double p = static_cast<double>(cnt) / n;
            sum1 += p * p;
        }
        return 1.0 - sum1;
    }
    double mean = 0.0;
    for (std::size_t i : idx) mean += labels[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i : idx) {
        const double d = labels[i] - mean;
        var += d * d;
    }
    return var / n;
}

double leaf_value(ImpurityKind kind, const std::vector<double>& labels,
                  const std::vector<std::size_t>& idx) {
    if (kind == ImpurityKind::Gini) {
        // Majority class, ties to the smaller label.
        std::vector<std::pair<double, std::size_t>> counts;
        for (std::size_t i : idx) {
            bool found = false;
            for (auto& [cls, cnt] : counts) {
                if (cls == labels[i]) { ++cnt; found = true; break; }
            }
            if (!found) counts.emplace_back(labels[i], 1);
        }
        std::sort(counts.begin(), counts.end());
        double best = counts.front().first;
        std::size_t best_count = counts.front().second;
        for (const auto& [cls, cnt] : counts) {
            if (cnt > best_count) { best = cls; best_count = cnt; }
        }
        return best;
    }
    double mean = 0.0;
    for (std::size_t i : idx) mean += labels[i];
    return mean / static_cast<double>(idx.size());
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;  // sample-weighted impurity decrease at this node
};

SplitCandidate best_split(const Matrix& features, const std::vector<double>& labels,
                          const std::vector<std::size_t>& idx, double parent_impurity,
                          ImpurityKind kind, const std::vector<std::size_t>& candidates) {
    SplitCandidate best;
    const double n = static_cast<double>(idx.size());
    std::vector<std::size_t> left, right;
    for (std::size_t f : candidates) {
        std::vector<double> values;
        values.reserve(idx.size());
        for (std::size_t i : idx) values.push_back(features[i][f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double threshold = 0.5 * (values[v] + values[v + 1]);
            left.clear();
            right.clear();
            for (std::size_t i : idx) {
                (features[i][f] <= threshold ? left : right).push_back(i);
            }
            if (left.empty() || right.empty()) continue;
            const double weighted =
                (static_cast<double>(left.size()) * node_impurity(kind, labels, left) +
                 static_cast<double>(right.size()) * node_impurity(kind, labels, right)) / n;
            const double gain = parent_impurity - weighted;
            // Tie-break: lowest feature index, then lowest threshold.
            if (gain > best.gain + 1e-15) {
                best = {static_cast<int>(f), threshold, gain};
            }
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& features, const std::vector<double>& labels,
                const ForestConfig& config, std::size_t features_per_split,
                std::mt19937_64& rng)
        : features_(features), labels_(labels), config_(config),
          features_per_split_(features_per_split), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> idx) {
        DecisionTree tree;
        grow(tree, std::move(idx), 0);
        return tree;
    }

private:
    int grow(DecisionTree& tree, std::vector<std::size_t> idx, std::size_t depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const double impurity = node_impurity(config_.impurity, labels_, idx);
        tree.nodes[static_cast<std::size_t>(node_id)].impurity = impurity;
        tree.nodes[static_cast<std::size_t>(node_id)].sample_count = idx.size();

        const bool depth_reached = config_.max_depth > 0 && depth >= config_.max_depth;
        SplitCandidate split;
        if (!depth_reached && impurity > 0.0 && idx.size() >= 2) {
            split = best_split(features_, labels_, idx, impurity, config_.impurity,
                               sample_candidates());
        }
        if (split.feature < 0) {
            tree.nodes[static_cast<std::size_t>(node_id)].leaf_value =
                leaf_value(config_.impurity, labels_, idx);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx) {
            (features_[i][static_cast<std::size_t>(split.feature)] <= split.threshold
                 ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        tree.nodes[static_cast<std::size_t>(node_id)].split_feature = split.feature;
        tree.nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
        const int l = grow(tree, std::move(left), depth + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].left = l;
        const int r = grow(tree, std::move(right), depth + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].right = r;
        return node_id;
    }

    std::vector<std::size_t> sample_candidates() {
        const std::size_t m = features_.front().size();
        std::vector<std::size_t> all(m);
        std::iota(all.begin(), all.end(), 0);
        if (features_per_split_ >= m) return all;
        // Partial Fisher-Yates; result kept sorted for deterministic tie-breaks.
        for (std::size_t i = 0; i < features_per_split_; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, m - 1);
            std::swap(all[i], all[pick(rng_)]);
        }
        all.resize(features_per_split_);
        std::sort(all.begin(), all.end());
        return all;
    }

    const Matrix& features_;
    const std::vector<double>& labels_;
    const ForestConfig& config_;
    std::size_t features_per_split_;
    std::mt19937_64& rng_;
};

}  // namespace

RandomForest::RandomForest(std::vector<DecisionTree> trees, std::size_t feature_count,
                           ForestConfig config)
    : trees_(std::move(trees)), feature_count_(feature_count), config_(config) {
    if (trees_.empty()) throw std::invalid_argument("RandomForest: need >= 1 tree");
}

std::vector<double> RandomForest::predict(const Matrix& batch) const {
    check_batch(batch);
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& row : batch) {
        double sum = 0.0;
        for (const auto& tree : trees_) sum += tree.predict_one(row);
        out.push_back(sum / static_cast<double>(trees_.size()));
    }
    return out;
}

RandomForest fit_forest(const Dataset& data, const ForestConfig& config) {
    if (data.rows() == 0) throw std::invalid_argument("fit_forest: empty dataset");
    if (!data.labels) throw std::invalid_argument("fit_forest: dataset has no labels");
    if (config.tree_count < 1) throw std::invalid_argument("fit_forest: tree_count must be >= 1");

    const std::size_t m = data.cols();
    const std::size_t n = data.rows();
    std::size_t per_split = config.features_per_split;
    if (per_split == 0)
        per_split = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));

    std::vector<DecisionTree> trees;
    trees.reserve(config.tree_count);
    for (std::size_t k = 0; k < config.tree_count; ++k) {
        auto rng = make_rng(config.seed, "tree", k);
        std::vector<std::size_t> idx(n);
        if (config.bootstrap && n > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& i : idx) i = pick(rng);
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        TreeBuilder builder(data.features, *data.labels, config, per_split, rng);
        trees.push_back(builder.build(std::move(idx)));
    }
    return RandomForest(std::move(trees), m, config);
}

FeatureDistribution impurity_importance(const RandomForest& forest) {
    const std::size_t m = forest.feature_count();
    std::vector<double> raw(m, 0.0);
    for (const auto& tree : forest.trees()) {
        const double root_n = static_cast<double>(tree.nodes.front().sample_count);
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const auto& left = tree.nodes[static_cast<std::size_t>(node.left)];
            const auto& right = tree.nodes[static_cast<std::size_t>(node.right)];
            const double n = static_cast<double>(node.sample_count);
            const double weighted_children =
                (static_cast<double>(left.sample_count) * left.impurity +
                 static_cast<double>(right.sample_count) * right.impurity) / n;
            raw[static_cast<std::size_t>(node.split_feature)] +=
                n / root_n * (node.impurity - weighted_children);
        }
    }
    double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (total <= 0.0) return uniform_distribution(m);
    for (auto& v : raw) v /= total;
    return {std::move(raw)};
}

}  // namespace shapkit
