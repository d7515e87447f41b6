#include "shapkit/shapley.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "shapkit/rng.hpp"

namespace shapkit {

void ValueFunctionContext::validate() const {
    if (!model) throw std::invalid_argument("ValueFunctionContext: model is null");
    if (instance.size() != model->feature_count())
        throw std::invalid_argument("ValueFunctionContext: instance length != feature_count");
    if (background.size() != model->feature_count())
        throw std::invalid_argument("ValueFunctionContext: background length != feature_count");
}

std::string ShapleyResult::to_json(const std::vector<std::string>& names) const {
    nlohmann::json out;
    out["base"] = base_value;
    out["features"] = nlohmann::json::array();
    for (std::size_t k = 0; k < indices.size(); ++k) {
        nlohmann::json f;
        f["index"] = indices[k];
        f["name"] = indices[k] < names.size() ? names[indices[k]]
                                              : "x" + std::to_string(indices[k] + 1);
        f["phi"] = values[k];
        out["features"].push_back(std::move(f));
    }
    out["model_calls"] = model_calls;
    return out.dump();
}

double shapley_coefficient(std::size_t s_size, std::size_t n_size) {
    if (n_size < 1 || s_size >= n_size)
        throw std::invalid_argument("shapley_coefficient: require 0 <= |S| <= |N|-1");
    // B(S,N) = |S|! (|N|-|S|-1)! / |N|! = 1 / (|N| * C(|N|-1, |S|))
    double binom = 1.0;
    for (std::size_t i = 1; i <= s_size; ++i) {
        binom *= static_cast<double>(n_size - s_size - 1 + i) / static_cast<double>(i);
    }
    return 1.0 / (static_cast<double>(n_size) * binom);
}

namespace {

void check_active(const ValueFunctionContext& ctx, const std::vector<std::size_t>& active) {
    if (active.empty()) throw std::invalid_argument("active index set J is empty");
    for (std::size_t i = 0; i + 1 < active.size(); ++i) {
        if (active[i] >= active[i + 1])
            throw std::invalid_argument("active index set J must be strictly ascending");
    }
    if (active.back() >= ctx.feature_count())
        throw std::invalid_argument("active index out of range");
}

// Hybrid input for a coalition bitmask over J: background everywhere,
// instance values at the kept positions.
FeatureVector hybrid_for_mask(const ValueFunctionContext& ctx,
                              const std::vector<std::size_t>& active, std::uint64_t mask) {
    FeatureVector h = ctx.background;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (mask & (1ULL << i)) h[active[i]] = ctx.instance[active[i]];
    }
    return h;
}

}  // namespace

double value_function(const ValueFunctionContext& ctx, const CoalitionSpec& spec,
                      std::uint64_t* model_calls) {
    ctx.validate();
    check_active(ctx, spec.active);
    FeatureVector h = ctx.background;
    for (std::size_t j : spec.kept) {
        if (std::find(spec.active.begin(), spec.active.end(), j) == spec.active.end())
            throw std::invalid_argument("value_function: kept index not in active set");
        h[j] = ctx.instance[j];
    }
    if (model_calls) ++*model_calls;
    return ctx.model->predict_one(h);
}

ShapleyResult exact_shapley(const ValueFunctionContext& ctx,
                            const std::vector<std::size_t>& active) {
    ctx.validate();
    check_active(ctx, active);
    const std::size_t t = active.size();
    if (t > kEnumerationCap)
        throw std::invalid_argument(
            "exact_shapley: |J| = " + std::to_string(t) + " exceeds the enumeration cap of " +
            std::to_string(kEnumerationCap) +
            "; use kernel_shap_baseline, permutation_shapley, or an ensemble explainer");

    const std::uint64_t n_masks = 1ULL << t;
    Matrix hybrids;
    hybrids.reserve(n_masks);
    for (std::uint64_t mask = 0; mask < n_masks; ++mask)
        hybrids.push_back(hybrid_for_mask(ctx, active, mask));
    const std::vector<double> v = ctx.model->predict(hybrids);

    ShapleyResult result;
    result.indices = active;
    result.values.assign(t, 0.0);
    result.base_value = v[0];
    result.model_calls = n_masks;

    // Per-size coefficients; every cached prediction is reused across all i.
    std::vector<double> coeff(t);
    for (std::size_t s = 0; s < t; ++s) coeff[s] = shapley_coefficient(s, t);

    for (std::size_t i = 0; i < t; ++i) {
        const std::uint64_t bit = 1ULL << i;
        double phi = 0.0;
        for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const auto s = static_cast<std::size_t>(std::popcount(mask));
            phi += coeff[s] * (v[mask | bit] - v[mask]);
        }
        result.values[i] = phi;
    }
    return result;
}

ShapleyResult kernel_shap_baseline(const ValueFunctionContext& ctx,
                                   const std::vector<std::size_t>& active,
                                   std::size_t sample_count, std::uint64_t seed) {
    ctx.validate();
    check_active(ctx, active);
    const std::size_t t = active.size();
    if (sample_count < t + 2)
        throw std::invalid_argument("kernel_shap_baseline: sample_count must be >= |J| + 2");

    ShapleyResult result;
    result.indices = active;
    result.values.assign(t, 0.0);

    // v(empty) and v(full) anchor the constrained regression.
    const std::vector<double> anchors =
        ctx.model->predict({hybrid_for_mask(ctx, active, 0),
                            hybrid_for_mask(ctx, active, (1ULL << t) - 1)});
    result.base_value = anchors[0];
    result.model_calls = 2;
    const double gain = anchors[1] - anchors[0];

    if (t == 1) {
        result.values[0] = gain;
        return result;
    }

    // Coalition masks with per-mask regression weights.
    std::unordered_map<std::uint64_t, double> weights;
    const std::uint64_t full = (1ULL << t) - 1;
    if (full - 1 <= sample_count) {
        // Budget covers exhaustive enumeration; use exact Shapley-kernel weights
        // pi(s) = (t-1) / (C(t,s) * s * (t-s)).
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            const auto s = static_cast<std::size_t>(std::popcount(mask));
            double binom = 1.0;
            for (std::size_t i = 1; i <= s; ++i)
                binom *= static_cast<double>(t - s + i) / static_cast<double>(i);
            weights[mask] = static_cast<double>(t - 1) /
                            (binom * static_cast<double>(s) * static_cast<double>(t - s));
        }
    } else {
        // Sample subset sizes with probability proportional to (t-1)/(s(t-s)),
        // then a uniform subset of that size; frequency carries the weight.
        auto rng = make_rng(seed, "kernel-shap");
        std::vector<double> size_weight(t - 1);
        for (std::size_t s = 1; s < t; ++s)
            size_weight[s - 1] = 1.0 / (static_cast<double>(s) * static_cast<double>(t - s));
        std::discrete_distribution<std::size_t> pick_size(size_weight.begin(), size_weight.end());
        std::vector<std::size_t> positions(t);
        std::iota(positions.begin(), positions.end(), 0);
        for (std::size_t k = 0; k < sample_count; ++k) {
            const std::size_t s = pick_size(rng) + 1;
            std::shuffle(positions.begin(), positions.end(), rng);
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < s; ++i) mask |= 1ULL << positions[i];
            weights[mask] += 1.0;
        }
    }

    std::vector<std::uint64_t> masks;
    masks.reserve(weights.size());
    for (const auto& [mask, w] : weights) masks.push_back(mask);
    std::sort(masks.begin(), masks.end());

    Matrix hybrids;
    hybrids.reserve(masks.size());
    for (std::uint64_t mask : masks) hybrids.push_back(hybrid_for_mask(ctx, active, mask));
    const std::vector<double> v = ctx.model->predict(hybrids);
    result.model_calls += masks.size();

    // Weighted least squares with the efficiency constraint sum(phi) = gain,
    // eliminating the last coefficient.
    const auto rows = static_cast<Eigen::Index>(masks.size());
    const auto cols = static_cast<Eigen::Index>(t - 1);
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::uint64_t mask = masks[static_cast<std::size_t>(r)];
        const double sqrt_w = std::sqrt(weights[mask]);
        const double z_last = (mask & (1ULL << (t - 1))) ? 1.0 : 0.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double z = (mask & (1ULL << c)) ? 1.0 : 0.0;
            design(r, c) = sqrt_w * (z - z_last);
        }
        target(r) = sqrt_w * (v[static_cast<std::size_t>(r)] - anchors[0] - z_last * gain);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols)
        throw std::runtime_error(
            "kernel_shap_baseline: degenerate design matrix; increase sample_count");
    Eigen::VectorXd phi_head = qr.solve(target);

    double sum = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        result.values[static_cast<std::size_t>(c)] = phi_head(c);
        sum += phi_head(c);
    }
    result.values[t - 1] = gain - sum;
    return result;
}

ShapleyResult permutation_shapley(const ValueFunctionContext& ctx,
                                  const std::vector<std::size_t>& active,
                                  std::size_t permutation_count, std::uint64_t seed) {
    ctx.validate();
    check_active(ctx, active);
    if (permutation_count < 1)
        throw std::invalid_argument("permutation_shapley: permutation_count must be >= 1");
    const std::size_t t = active.size();

    ShapleyResult result;
    result.indices = active;
    result.values.assign(t, 0.0);
    result.base_value = ctx.model->predict_one(hybrid_for_mask(ctx, active, 0));
    result.model_calls = 1;

    auto rng = make_rng(seed, "permutation-shap");
    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = 0; k < permutation_count; ++k) {
        std::shuffle(order.begin(), order.end(), rng);
        // One batched prediction per permutation: prefixes of size 1..t.
        Matrix prefixes;
        prefixes.reserve(t);
        std::uint64_t mask = 0;
        for (std::size_t pos : order) {
            mask |= 1ULL << pos;
            prefixes.push_back(hybrid_for_mask(ctx, active, mask));
        }
        const std::vector<double> v = ctx.model->predict(prefixes);
        result.model_calls += t;
        double prev = result.base_value;
        for (std::size_t step = 0; step < t; ++step) {
            result.values[order[step]] += v[step] - prev;
            prev = v[step];
        }
    }
    for (auto& phi : result.values) phi /= static_cast<double>(permutation_count);
    return result;
}

}  // namespace shapkit
