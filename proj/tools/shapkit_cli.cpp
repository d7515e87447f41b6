// Command-line front end: explain single instances, compare explainers
// against the exact baseline, run N x t sweeps, and benchmark.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapkit/blackbox.hpp"
#include "shapkit/dataset.hpp"
#include "shapkit/ensemble.hpp"
#include "shapkit/external_model.hpp"
#include "shapkit/forest.hpp"
#include "shapkit/metrics.hpp"
#include "shapkit/rng.hpp"
#include "shapkit/shapley.hpp"

namespace {

using namespace shapkit;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("SHAPKIT_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "debug") return 0;
        if (v == "warn") return 2;
        if (v == "error") return 3;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() <= 1) std::cerr << "[shapkit] " << msg << "\n";
}

struct RunSpec {
    std::string data_source;
    std::string label_column = "y";
    std::size_t synthetic_n = 400;
    std::string model = "rbf";
    std::string model_cmd;
    double gamma = 2.0;
    double lambda = 1e-3;
    std::size_t trees = 100;
    std::size_t depth = 0;
    std::string explainer = "er-shap";
    std::string baseline = "auto";
    std::size_t n = 50;
    std::size_t t = 0;
    std::string combiner = "mean";
    double sigma = 0.01;
    double temperature = 0.0;  // 0 = off
    std::size_t neighbors = 200;
    std::size_t samples = 2048;
    std::size_t permutations = 1000;
    std::string instance = "paper-default";
    std::size_t instances = 20;
    std::size_t repeats = 5;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> t_grid;
};

std::vector<double> parse_number_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

Dataset load_data(const RunSpec& spec) {
    const std::string& src = spec.data_source;
    if (src.rfind("synthetic:", 0) == 0) {
        std::string rest = src.substr(10);
        std::size_t n = spec.synthetic_n;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            n = std::stoul(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        return generate_synthetic(parse_pattern(rest), n, derive_seed(spec.seed, "dataset"));
    }
    std::string path = src;
    if (src.rfind("csv:", 0) == 0) path = src.substr(4);
    return load_csv(path, spec.label_column);
}

std::unique_ptr<BlackBoxModel> build_model(const RunSpec& spec, const Dataset& data) {
    if (!spec.model_cmd.empty()) {
        log_info("connecting to external model: " + spec.model_cmd);
        return std::make_unique<ExternalModel>(spec.model_cmd);
    }
    if (spec.model == "rbf") {
        log_info("training rbf kernel classifier (gamma=" + std::to_string(spec.gamma) + ")");
        return std::make_unique<RbfKernelClassifier>(
            train_rbf_classifier(data, spec.gamma, spec.lambda));
    }
    if (spec.model == "forest") {
        ForestConfig config;
        config.tree_count = spec.trees;
        config.max_depth = spec.depth;
        config.impurity = ImpurityKind::Variance;
        config.seed = derive_seed(spec.seed, "model-forest");
        log_info("fitting random forest (" + std::to_string(spec.trees) + " trees)");
        return std::make_unique<RandomForest>(fit_forest(data, config));
    }
    if (spec.model.rfind("linear:", 0) == 0) {
        std::string rest = spec.model.substr(7);
        double intercept = 0.0;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            intercept = std::stod(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        return std::make_unique<LinearModel>(parse_number_list(rest), intercept);
    }
    throw std::invalid_argument("unknown model: " + spec.model +
                                " (expected rbf, forest, linear:<coefs>, or --model-cmd)");
}

FeatureVector resolve_instance(const RunSpec& spec, const Dataset& data) {
    if (spec.instance == "paper-default") return default_instance(data.cols());
    if (spec.instance.rfind("row:", 0) == 0) {
        const std::size_t row = std::stoul(spec.instance.substr(4));
        if (row >= data.rows())
            throw std::invalid_argument("instance row " + std::to_string(row) + " out of range");
        return data.features[row];
    }
    FeatureVector x = parse_number_list(spec.instance);
    if (x.size() != data.cols())
        throw std::invalid_argument("instance has " + std::to_string(x.size()) +
                                    " features, dataset has " + std::to_string(data.cols()));
    return x;
}

ExplainerConfig explainer_config(const RunSpec& spec, std::uint64_t seed) {
    ExplainerConfig config;
    config.ensemble_size = spec.n;
    config.features_per_member = spec.t;
    config.combiner = parse_combiner(spec.combiner);
    config.neighbor_noise_std = spec.sigma;
    if (spec.temperature > 0.0) config.temperature = spec.temperature;
    config.neighbor_count = spec.neighbors;
    config.seed = seed;
    return config;
}

std::vector<std::size_t> all_indices(std::size_t m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

// Uniform report shape for exact/baseline/ensemble explainers.
struct ExplainOutcome {
    std::vector<double> values;  // full length m
    double base_value = 0.0;
    std::uint64_t model_calls = 0;
    double wall_time_ms = 0.0;
    std::string json;
};

ExplainOutcome run_explainer(const std::string& name, const ValueFunctionContext& ctx,
                             const RunSpec& spec, std::uint64_t seed,
                             const std::vector<std::string>& feature_names) {
    const std::size_t m = ctx.feature_count();
    ExplainOutcome out;
    const auto start = std::chrono::steady_clock::now();
    if (name == "exact" || name == "kernel" || name == "perm") {
        ShapleyResult result;
        if (name == "exact") {
            result = exact_shapley(ctx, all_indices(m));
        } else if (name == "kernel") {
            result = kernel_shap_baseline(ctx, all_indices(m), spec.samples, seed);
        } else {
            result = permutation_shapley(ctx, all_indices(m), spec.permutations, seed);
        }
        out.values = result.values;
        out.base_value = result.base_value;
        out.model_calls = result.model_calls;
        out.json = result.to_json(feature_names);
    } else {
        const ExplainerConfig config = explainer_config(spec, seed);
        EnsembleReport report;
        if (name == "er-shap") {
            report = er_shap(ctx, config);
        } else if (name == "erw-shap") {
            report = erw_shap(ctx, config);
        } else if (name == "er-shap-rf") {
            report = er_shap_rf(ctx, config);
        } else {
            throw std::invalid_argument("unknown explainer: " + name);
        }
        out.values = report.values;
        out.base_value = report.base_value;
        out.model_calls = report.model_calls;
        out.json = report.to_json(feature_names);
    }
    out.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

void write_output(const RunSpec& spec, const std::string& content) {
    if (spec.out.empty()) {
        std::cout << content << "\n";
        return;
    }
    std::ofstream file(spec.out);
    if (!file) throw std::runtime_error("cannot open output file " + spec.out);
    file << content << "\n";
}

std::vector<std::size_t> instance_panel(const RunSpec& spec, const Dataset& data) {
    auto rng = make_rng(spec.seed, "panel");
    std::vector<std::size_t> rows(data.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(std::min(spec.instances, data.rows()));
    return rows;
}

std::string resolve_baseline(const RunSpec& spec, std::size_t m) {
    if (spec.baseline != "auto") return spec.baseline;
    return m <= kEnumerationCap ? "exact" : "kernel";
}

int cmd_explain(const RunSpec& spec) {
    const Dataset data = load_data(spec);
    const auto model = build_model(spec, data);
    ValueFunctionContext ctx{model.get(), resolve_instance(spec, data), background_means(data)};
    const ExplainOutcome outcome =
        run_explainer(spec.explainer, ctx, spec, derive_seed(spec.seed, "explain"), data.names);
    write_output(spec, outcome.json);
    return 0;
}

int cmd_compare(const RunSpec& spec) {
    if (spec.explainer == "exact")
        throw std::invalid_argument("compare: candidate explainer must not be exact");
    const Dataset data = load_data(spec);
    const auto model = build_model(spec, data);
    const std::string baseline = resolve_baseline(spec, data.cols());

    std::ostringstream csv;
    csv << "C,E,concordant,discordant,tied,call_ratio,time_ratio\n";
    const auto panel = instance_panel(spec, data);
    for (std::size_t p = 0; p < panel.size(); ++p) {
        ValueFunctionContext ctx{model.get(), data.features[panel[p]], background_means(data)};
        const std::uint64_t seed = derive_seed(spec.seed, "compare", p);
        const ExplainOutcome ref = run_explainer(baseline, ctx, spec, seed, data.names);
        const ExplainOutcome cand = run_explainer(spec.explainer, ctx, spec, seed, data.names);
        ComparisonResult row = compare_attributions(ref.values, cand.values);
        std::tie(row.call_ratio, row.time_ratio) =
            cost_ratio(cand.model_calls, cand.wall_time_ms, ref.model_calls, ref.wall_time_ms);
        csv << row.to_csv_row() << "\n";
    }
    write_output(spec, csv.str());
    return 0;
}

struct SweepCell {
    double mean_c = 0.0;
    double mean_e = 0.0;
    double mean_time_ratio = 0.0;
};

std::string grid_csv(const std::vector<std::vector<SweepCell>>& grid,
                     const std::vector<std::size_t>& n_grid,
                     const std::vector<std::size_t>& t_grid, double SweepCell::*field) {
    std::ostringstream out;
    out.precision(17);
    out << "N";
    for (std::size_t t : t_grid) out << ",t=" << t;
    out << "\n";
    for (std::size_t r = 0; r < n_grid.size(); ++r) {
        out << n_grid[r];
        for (std::size_t c = 0; c < t_grid.size(); ++c) out << ',' << grid[r][c].*field;
        out << "\n";
    }
    return out.str();
}

int cmd_sweep(const RunSpec& spec) {
    if (spec.n_grid.empty() || spec.t_grid.empty())
        throw std::invalid_argument("sweep: --n-grid and --t-grid must be nonempty");
    const Dataset data = load_data(spec);
    const auto model = build_model(spec, data);
    const std::string baseline = resolve_baseline(spec, data.cols());
    const auto panel = instance_panel(spec, data);

    // Baselines are shared across all grid cells for a fixed panel.
    std::vector<ExplainOutcome> refs;
    std::vector<ValueFunctionContext> contexts;
    const auto background = background_means(data);
    for (std::size_t p = 0; p < panel.size(); ++p) {
        contexts.push_back({model.get(), data.features[panel[p]], background});
        refs.push_back(run_explainer(baseline, contexts.back(), spec,
                                     derive_seed(spec.seed, "compare", p), data.names));
    }

    std::vector<std::vector<SweepCell>> grid(spec.n_grid.size(),
                                             std::vector<SweepCell>(spec.t_grid.size()));
    for (std::size_t r = 0; r < spec.n_grid.size(); ++r) {
        for (std::size_t c = 0; c < spec.t_grid.size(); ++c) {
            RunSpec cell_spec = spec;
            cell_spec.n = spec.n_grid[r];
            cell_spec.t = spec.t_grid[c];
            SweepCell cell;
            for (std::size_t p = 0; p < panel.size(); ++p) {
                const ExplainOutcome cand =
                    run_explainer(spec.explainer, contexts[p], cell_spec,
                                  derive_seed(spec.seed, "compare", p), data.names);
                const ComparisonResult cmp = compare_attributions(refs[p].values, cand.values);
                cell.mean_c += cmp.concordance;
                cell.mean_e += cmp.euclidean;
                cell.mean_time_ratio += cand.wall_time_ms / refs[p].wall_time_ms;
            }
            const double count = static_cast<double>(panel.size());
            cell.mean_c /= count;
            cell.mean_e /= count;
            cell.mean_time_ratio /= count;
            grid[r][c] = cell;
            log_info("sweep cell N=" + std::to_string(cell_spec.n) +
                     " t=" + std::to_string(cell_spec.t) +
                     " C=" + std::to_string(cell.mean_c));
        }
    }

    write_output(spec, grid_csv(grid, spec.n_grid, spec.t_grid, &SweepCell::mean_c));
    if (!spec.out.empty()) {
        std::ofstream(spec.out + ".E.csv")
            << grid_csv(grid, spec.n_grid, spec.t_grid, &SweepCell::mean_e);
        std::ofstream(spec.out + ".time.csv")
            << grid_csv(grid, spec.n_grid, spec.t_grid, &SweepCell::mean_time_ratio);
    }
    return 0;
}

int cmd_bench(const RunSpec& spec) {
    const Dataset data = load_data(spec);
    const auto model = build_model(spec, data);
    ValueFunctionContext ctx{model.get(), resolve_instance(spec, data), background_means(data)};

    std::ostringstream csv;
    csv << "explainer,median_ms,model_calls\n";
    const std::vector<std::string> explainers = {"exact", spec.explainer};
    for (const auto& name : explainers) {
        std::vector<double> times;
        std::uint64_t calls = 0;
        for (std::size_t rep = 0; rep < std::max<std::size_t>(spec.repeats, 5); ++rep) {
            const ExplainOutcome outcome =
                run_explainer(name, ctx, spec, derive_seed(spec.seed, "bench"), data.names);
            times.push_back(outcome.wall_time_ms);
            calls = outcome.model_calls;
        }
        std::sort(times.begin(), times.end());
        csv << name << ',' << times[times.size() / 2] << ',' << calls << "\n";
    }
    write_output(spec, csv.str());
    return 0;
}

void apply_spec_file(RunSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("data")) spec.data_source = j["data"].get<std::string>();
    if (j.contains("label")) spec.label_column = j["label"].get<std::string>();
    if (j.contains("model")) spec.model = j["model"].get<std::string>();
    if (j.contains("model_cmd")) spec.model_cmd = j["model_cmd"].get<std::string>();
    if (j.contains("explainer")) spec.explainer = j["explainer"].get<std::string>();
    if (j.contains("baseline")) spec.baseline = j["baseline"].get<std::string>();
    if (j.contains("n")) spec.n = j["n"].get<std::size_t>();
    if (j.contains("t")) spec.t = j["t"].get<std::size_t>();
    if (j.contains("combiner")) spec.combiner = j["combiner"].get<std::string>();
    if (j.contains("sigma")) spec.sigma = j["sigma"].get<double>();
    if (j.contains("temperature")) spec.temperature = j["temperature"].get<double>();
    if (j.contains("neighbors")) spec.neighbors = j["neighbors"].get<std::size_t>();
    if (j.contains("instance")) spec.instance = j["instance"].get<std::string>();
    if (j.contains("instances")) spec.instances = j["instances"].get<std::size_t>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_grid")) spec.n_grid = j["n_grid"].get<std::vector<std::size_t>>();
    if (j.contains("t_grid")) spec.t_grid = j["t_grid"].get<std::vector<std::size_t>>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shapkit: ensemble Shapley-value explanations for black-box models"};
    app.require_subcommand(1);

    RunSpec spec;
    std::string spec_file;
    std::string n_grid_csv;
    std::string t_grid_csv;

    auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--data", spec.data_source,
                        "synthetic:<pattern>[:n] or csv:<path> or <path>");
        cmd->add_option("--label", spec.label_column, "CSV label column name");
        cmd->add_option("--rows", spec.synthetic_n, "synthetic dataset size");
        cmd->add_option("--model", spec.model, "rbf | forest | linear:<coefs>[:<intercept>]");
        cmd->add_option("--model-cmd", spec.model_cmd, "external model command line");
        cmd->add_option("--gamma", spec.gamma, "rbf kernel width");
        cmd->add_option("--lambda", spec.lambda, "rbf ridge regularization");
        cmd->add_option("--trees", spec.trees, "forest model tree count");
        cmd->add_option("--depth", spec.depth, "forest model depth limit (0 = unbounded)");
        cmd->add_option("--explainer", spec.explainer,
                        "exact | kernel | perm | er-shap | erw-shap | er-shap-rf");
        cmd->add_option("--baseline", spec.baseline, "compare baseline: auto | exact | kernel | perm");
        cmd->add_option("--n", spec.n, "ensemble size N");
        cmd->add_option("--t", spec.t, "features per member t (0 = ceil(sqrt(m)))");
        cmd->add_option("--combiner", spec.combiner, "mean | weighted-mean | max | min");
        cmd->add_option("--sigma", spec.sigma, "neighbor noise std (ERW)");
        cmd->add_option("--temperature", spec.temperature, "temperature T (RF variant, 0 = off)");
        cmd->add_option("--neighbors", spec.neighbors, "neighbor count M (RF variant)");
        cmd->add_option("--samples", spec.samples, "kernel SHAP sample budget");
        cmd->add_option("--permutations", spec.permutations, "permutation SHAP budget");
        cmd->add_option("--instance", spec.instance, "paper-default | row:<i> | v1,v2,...");
        cmd->add_option("--instances", spec.instances, "panel size for compare/sweep");
        cmd->add_option("--repeats", spec.repeats, "bench repetitions (median of >= 5)");
        cmd->add_option("--seed", spec.seed, "master seed");
        cmd->add_option("--out", spec.out, "output path (default stdout)");
        cmd->add_option("--format", spec.format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--spec", spec_file, "JSON run-spec file");
    };

    auto* explain = app.add_subcommand("explain", "explain one instance");
    auto* compare = app.add_subcommand("compare", "compare an explainer against the baseline");
    auto* sweep = app.add_subcommand("sweep", "N x t heatmap sweep");
    auto* bench = app.add_subcommand("bench", "timing benchmark vs exact enumeration");
    for (auto* cmd : {explain, compare, sweep, bench}) add_shared(cmd);
    sweep->add_option("--n-grid", n_grid_csv, "comma-separated N values");
    sweep->add_option("--t-grid", t_grid_csv, "comma-separated t values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!spec_file.empty()) apply_spec_file(spec, spec_file);
        if (!n_grid_csv.empty())
            for (double v : parse_number_list(n_grid_csv))
                spec.n_grid.push_back(static_cast<std::size_t>(v));
        if (!t_grid_csv.empty())
            for (double v : parse_number_list(t_grid_csv))
                spec.t_grid.push_back(static_cast<std::size_t>(v));
        if (spec.data_source.empty())
            throw std::invalid_argument("--data is required (or provide it via --spec)");

        if (explain->parsed()) return cmd_explain(spec);
        if (compare->parsed()) return cmd_compare(spec);
        if (sweep->parsed()) return cmd_sweep(spec);
        return cmd_bench(spec);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
