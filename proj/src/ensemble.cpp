#include "shapkit/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "shapkit/rng.hpp"

namespace shapkit {

Combiner parse_combiner(const std::string& name) {
    if (name == "mean") return Combiner::Mean;
    if (name == "weighted-mean") return Combiner::WeightedMean;
    if (name == "max") return Combiner::Max;
    if (name == "min") return Combiner::Min;
    throw std::invalid_argument("unknown combiner: " + name);
}

std::size_t ExplainerConfig::resolved_t(std::size_t m) const {
    std::size_t t = features_per_member;
    if (t == 0) t = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    if (t < 1 || t > m)
        throw std::invalid_argument("ExplainerConfig: require 1 <= t <= m, got t = " +
                                    std::to_string(t) + ", m = " + std::to_string(m));
    return t;
}

std::string EnsembleReport::to_json(const std::vector<std::string>& names,
                                    bool include_members) const {
    nlohmann::json out;
    out["base"] = base_value;
    out["features"] = nlohmann::json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        nlohmann::json f;
        f["index"] = i;
        f["name"] = i < names.size() ? names[i] : "x" + std::to_string(i + 1);
        f["phi"] = values[i];
        out["features"].push_back(std::move(f));
    }
    out["model_calls"] = model_calls;
    out["selection_counts"] = selection_counts;
    out["unobserved"] = nlohmann::json::array();
    for (bool flag : unobserved) out["unobserved"].push_back(flag);
    out["wall_time_ms"] = wall_time_ms;
    if (include_members) {
        out["members"] = nlohmann::json::array();
        for (const auto& rec : members) {
            nlohmann::json msg;
            msg["k"] = rec.member_index;
            msg["selected"] = rec.selected;
            msg["weight"] = rec.weight;
            msg["phi"] = rec.values;
            out["members"].push_back(std::move(msg));
        }
    }
    return out.dump();
}

namespace {

// Neumaier-compensated accumulator.
struct Accumulator {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + compensation; }
};

std::vector<std::size_t> uniform_sample_without_replacement(std::size_t m, std::size_t t,
                                                            std::mt19937_64& rng) {
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < t; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    all.resize(t);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

std::vector<std::size_t> weighted_sample_without_replacement(const FeatureDistribution& p,
                                                             std::size_t t,
                                                             std::mt19937_64& rng) {
    const std::size_t m = p.size();
    if (t > m) throw std::invalid_argument("weighted sample: t > m");
    std::vector<double> remaining = p.probabilities;
    std::vector<std::size_t> chosen;
    chosen.reserve(t);
    for (std::size_t draw = 0; draw < t; ++draw) {
        const double total = std::accumulate(remaining.begin(), remaining.end(), 0.0);
        std::uniform_real_distribution<double> unit(0.0, total);
        double u = unit(rng);
        std::size_t picked = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (remaining[i] <= 0.0) continue;
            u -= remaining[i];
            if (u <= 0.0) { picked = i; break; }
            picked = i;  // numeric slack lands on the last positive entry
        }
        chosen.push_back(picked);
        remaining[picked] = 0.0;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

void combine(const std::vector<MemberRecord>& members, Combiner rule, std::size_t m,
             EnsembleReport& out) {
    if (members.empty()) throw std::invalid_argument("combine: empty member list");

    std::vector<const MemberRecord*> ordered;
    ordered.reserve(members.size());
    for (const auto& rec : members) ordered.push_back(&rec);
    std::sort(ordered.begin(), ordered.end(),
              [](const MemberRecord* a, const MemberRecord* b) {
                  return a->member_index < b->member_index;
              });

    out.values.assign(m, 0.0);
    out.unobserved.assign(m, true);
    out.selection_counts.assign(m, 0);
    out.weight_sums.assign(m, 0.0);

    std::vector<Accumulator> phi_sum(m);
    std::vector<Accumulator> weight_sum(m);
    std::vector<double> extreme(m, 0.0);

    for (const MemberRecord* rec : ordered) {
        // Mean is the weighted fold with unit weights (Eq-equivalent and
        // bitwise identical when every w_k is exactly 1).
        const double w = rule == Combiner::WeightedMean ? rec->weight : 1.0;
        for (std::size_t pos = 0; pos < rec->selected.size(); ++pos) {
            const std::size_t i = rec->selected[pos];
            const double phi = rec->values[pos];
            ++out.selection_counts[i];
            weight_sum[i].add(w);
            phi_sum[i].add(w * phi);
            if (out.unobserved[i]) {
                extreme[i] = phi;
            } else if (rule == Combiner::Max) {
                extreme[i] = std::max(extreme[i], phi);
            } else if (rule == Combiner::Min) {
                extreme[i] = std::min(extreme[i], phi);
            }
            out.unobserved[i] = false;
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        if (out.unobserved[i]) continue;
        out.weight_sums[i] = weight_sum[i].value();
        if (rule == Combiner::Max || rule == Combiner::Min) {
            out.values[i] = extreme[i];
        } else {
            out.values[i] = phi_sum[i].value() / out.weight_sums[i];
        }
    }
}

namespace {

EnsembleReport run_ensemble(const ValueFunctionContext& ctx, const ExplainerConfig& config,
                            bool perturb_neighbors, const FeatureDistribution* bias,
                            std::uint64_t extra_calls) {
    ctx.validate();
    const std::size_t m = ctx.feature_count();
    const std::size_t t = config.resolved_t(m);
    if (config.ensemble_size < 1)
        throw std::invalid_argument("ExplainerConfig: N must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    EnsembleReport report;
    report.model_calls = extra_calls;

    std::vector<MemberRecord> members;
    members.reserve(config.ensemble_size);
    for (std::size_t k = 0; k < config.ensemble_size; ++k) {
        MemberRecord rec;
        rec.member_index = k;

        auto subset_rng = make_rng(config.seed, "subset", k);
        rec.selected = bias ? weighted_sample_without_replacement(*bias, t, subset_rng)
                            : uniform_sample_without_replacement(m, t, subset_rng);

        ValueFunctionContext member_ctx = ctx;
        if (perturb_neighbors) {
            auto noise_rng = make_rng(config.seed, "noise", k);
            std::normal_distribution<double> noise(0.0, 1.0);
            double dist2 = 0.0;
            rec.neighbor.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double eps = config.neighbor_noise_std * noise(noise_rng);
                rec.neighbor[i] = ctx.instance[i] + eps;
                dist2 += eps * eps;
            }
            rec.weight = std::exp(-dist2);
            member_ctx.instance = rec.neighbor;
        } else {
            rec.neighbor = ctx.instance;
            rec.weight = 1.0;
        }

        ShapleyResult member = exact_shapley(member_ctx, rec.selected);
        rec.values = std::move(member.values);
        report.model_calls += member.model_calls;
        if (k == 0) report.base_value = member.base_value;
        members.push_back(std::move(rec));
    }

    combine(members, config.combiner, m, report);
    report.members = std::move(members);
    report.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    return report;
}

}  // namespace

EnsembleReport er_shap(const ValueFunctionContext& ctx, const ExplainerConfig& config) {
    return run_ensemble(ctx, config, false, nullptr, 0);
}

EnsembleReport erw_shap(const ValueFunctionContext& ctx, const ExplainerConfig& config) {
    if (config.neighbor_noise_std < 0.0)
        throw std::invalid_argument("erw_shap: sigma must be >= 0");
    ExplainerConfig weighted = config;
    if (weighted.combiner == Combiner::Mean) weighted.combiner = Combiner::WeightedMean;
    return run_ensemble(ctx, weighted, true, nullptr, 0);
}

EnsembleReport er_shap_rf(const ValueFunctionContext& ctx, const ExplainerConfig& config) {
    ctx.validate();
    const std::size_t m = ctx.feature_count();
    const std::size_t t = config.resolved_t(m);
    if (config.neighbor_count < 1)
        throw std::invalid_argument("er_shap_rf: neighbor_count must be >= 1");

    // Pre-training: label M neighbors of x with the black box and fit a
    // regression forest on the scores.
    const Matrix neighbors = generate_neighbors(ctx.instance, config.neighbor_count,
                                                config.rf_noise_std,
                                                derive_seed(config.seed, "rf-neighbors"));
    const std::vector<double> labels = ctx.model->predict(neighbors);

    Dataset local;
    local.features = neighbors;
    for (std::size_t j = 0; j < m; ++j) local.names.push_back("x" + std::to_string(j + 1));
    local.labels = labels;
    local.provenance = "rf-neighborhood";

    ForestConfig forest_config;
    forest_config.tree_count = 10;
    forest_config.max_depth = 0;
    forest_config.impurity = ImpurityKind::Variance;
    forest_config.seed = derive_seed(config.seed, "rf-forest");
    const RandomForest forest = fit_forest(local, forest_config);

    FeatureDistribution bias = impurity_importance(forest);
    if (config.temperature) {
        bias = temperature_scale(bias, *config.temperature);
    } else if (t > 1) {
        const std::size_t nonzero =
            static_cast<std::size_t>(std::count_if(bias.probabilities.begin(),
                                                   bias.probabilities.end(),
                                                   [](double p) { return p > 0.0; }));
        if (nonzero < t) {
            std::cerr << "er_shap_rf: importance distribution too sparse for t = " << t
                      << "; applying temperature smoothing (T = 1)\n";
            bias = temperature_scale(bias, 1.0);
        }
    }

    return run_ensemble(ctx, config, false, &bias, config.neighbor_count);
}

}  // namespace shapkit
