#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shapkit {

using FeatureVector = std::vector<double>;
using Matrix = std::vector<FeatureVector>;

/// Immutable tabular dataset: n rows of m numeric features, optional labels.
struct Dataset {
    Matrix features;
    std::vector<std::string> names;
    std::optional<std::vector<double>> labels;
    std::string provenance;

    std::size_t rows() const { return features.size(); }
    std::size_t cols() const { return features.empty() ? 0 : features.front().size(); }
};

enum class SyntheticPattern { Linear, Stripe, Saw, Wedge, Checkerboard };

SyntheticPattern parse_pattern(const std::string& name);
std::string pattern_name(SyntheticPattern pattern);

// Class-boundary geometries over features 1-2; features 3-5 carry no signal.
struct PatternGeometry {
    double stripe_half_width = 0.33;
    double saw_amplitude = 0.5;
    double saw_frequency = 3.0;
    double wedge_slope = 1.5;
    int board_cells = 3;
};

// Label of a point under a pattern; depends on the first two features only.
double pattern_label(SyntheticPattern pattern, double x1, double x2,
                     const PatternGeometry& geometry = {});

// n instances of 5 features, all uniform on [-1,1]; labels from the pattern.
Dataset generate_synthetic(SyntheticPattern pattern, std::size_t n, std::uint64_t seed,
                           const PatternGeometry& geometry = {});

Dataset load_csv(const std::string& path, const std::string& label_column = "");
void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column = "");

std::vector<double> background_means(const Dataset& data);

// h_j = x + eps_j, eps_j ~ Normal(0, sigma^2) i.i.d. per feature.
Matrix generate_neighbors(const FeatureVector& x, std::size_t count, double sigma,
                          std::uint64_t seed);

// Reference explained instance used by the reproduction scripts: all features 0.25.
FeatureVector default_instance(std::size_t m);

}  // namespace shapkit
