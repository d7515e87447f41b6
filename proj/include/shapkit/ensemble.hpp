#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/forest.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

enum class Combiner { Mean, WeightedMean, Max, Min };

Combiner parse_combiner(const std::string& name);

struct ExplainerConfig {
    std::size_t ensemble_size = 50;        // N
    std::size_t features_per_member = 0;   // t; 0 = ceil(sqrt(m))
    Combiner combiner = Combiner::Mean;
    double neighbor_noise_std = 0.01;      // sigma (ERW)
    std::optional<double> temperature;     // T (RF variant); opt-in
    std::size_t neighbor_count = 200;      // M (RF variant)
    double rf_noise_std = 0.1;             // neighbor std for the RF pre-trainer
    std::uint64_t seed = 0;

    std::size_t resolved_t(std::size_t m) const;
};

struct MemberRecord {
    std::size_t member_index = 0;
    std::vector<std::size_t> selected;  // J_k, ascending
    FeatureVector neighbor;             // h_k (ERW; equals x otherwise)
    double weight = 1.0;                // w_k in (0, 1]
    std::vector<double> values;         // phi_i^(k) for i in J_k
};

struct EnsembleReport {
    std::vector<double> values;            // final phi_1..phi_m
    std::vector<bool> unobserved;          // N_i = 0 markers
    std::vector<std::uint64_t> selection_counts;
    std::vector<double> weight_sums;
    std::vector<MemberRecord> members;
    double base_value = 0.0;
    std::uint64_t model_calls = 0;
    double wall_time_ms = 0.0;

    std::string to_json(const std::vector<std::string>& names = {},
                        bool include_members = false) const;
};

// Eq-style folds over member records: mean and weighted mean divide by the
// selection count / weight sum; max and min are the pessimistic/optimistic
// rules. Features selected by no member come back as 0 with the unobserved
// flag set. Order independent: members are sorted by index before a
// compensated-summation fold.
void combine(const std::vector<MemberRecord>& members, Combiner rule, std::size_t m,
             EnsembleReport& out);

// Ensemble of N random exact SHAPs over t uniformly drawn features each.
EnsembleReport er_shap(const ValueFunctionContext& ctx, const ExplainerConfig& config);

// ER-SHAP over Gaussian-perturbed neighbors of x, combined with distance
// weights w_k = exp(-|h_k - x|^2).
EnsembleReport erw_shap(const ValueFunctionContext& ctx, const ExplainerConfig& config);

// ER-SHAP with subset sampling biased by random-forest impurity importance,
// the forest being pre-trained on model-labeled neighbors of x.
EnsembleReport er_shap_rf(const ValueFunctionContext& ctx, const ExplainerConfig& config);

// t distinct indices by successive weighted draws with renormalization.
std::vector<std::size_t> weighted_sample_without_replacement(
    const FeatureDistribution& p, std::size_t t, std::mt19937_64& rng);

}  // namespace shapkit
