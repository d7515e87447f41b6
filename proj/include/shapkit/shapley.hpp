#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapkit/blackbox.hpp"
#include "shapkit/dataset.hpp"

namespace shapkit {

/// Everything the coalition value function needs: the model, the explained
/// instance, and per-feature background means that fill removed features.
struct ValueFunctionContext {
    const BlackBoxModel* model = nullptr;
    FeatureVector instance;
    FeatureVector background;

    void validate() const;
    std::size_t feature_count() const { return instance.size(); }
};

/// Active index set J (the features under analysis) and the subset S of J
/// kept at the instance's values. Everything else takes the background mean.
struct CoalitionSpec {
    std::vector<std::size_t> active;  // J, ascending
    std::vector<std::size_t> kept;    // S, subset of J
};

struct ShapleyResult {
    std::vector<std::size_t> indices;  // J, ascending
    std::vector<double> values;        // phi_i for i in J
    double base_value = 0.0;           // phi_0 = v(empty)
    std::uint64_t model_calls = 0;

    std::string to_json(const std::vector<std::string>& names = {}) const;
};

// |S|! (|N|-|S|-1)! / |N|!, computed by iterative ratio.
double shapley_coefficient(std::size_t s_size, std::size_t n_size);

double value_function(const ValueFunctionContext& ctx, const CoalitionSpec& spec,
                      std::uint64_t* model_calls = nullptr);

// Default cap on |J|: 2^20 hybrid predictions.
inline constexpr std::size_t kEnumerationCap = 20;

// Exact Shapley values over J by full coalition enumeration. All 2^|J|
// hybrids are built once and predicted in a single batch, so the cost is
// 2^|J| model evaluations, not |J| * 2^|J|.
ShapleyResult exact_shapley(const ValueFunctionContext& ctx,
                            const std::vector<std::size_t>& active);

// Shapley-kernel weighted least squares over sampled coalitions, constrained
// so base value plus estimates sum to the full prediction. Enumerates all
// non-trivial coalitions whenever the budget covers them.
ShapleyResult kernel_shap_baseline(const ValueFunctionContext& ctx,
                                   const std::vector<std::size_t>& active,
                                   std::size_t sample_count, std::uint64_t seed);

// Monte Carlo over uniformly sampled feature orderings.
ShapleyResult permutation_shapley(const ValueFunctionContext& ctx,
                                  const std::vector<std::size_t>& active,
                                  std::size_t permutation_count, std::uint64_t seed);

}  // namespace shapkit
