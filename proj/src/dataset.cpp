#include "shapkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shapkit/rng.hpp"

namespace shapkit {

SyntheticPattern parse_pattern(const std::string& name) {
    if (name == "linear") return SyntheticPattern::Linear;
    if (name == "stripe") return SyntheticPattern::Stripe;
    if (name == "saw") return SyntheticPattern::Saw;
    if (name == "wedge") return SyntheticPattern::Wedge;
    if (name == "checkerboard") return SyntheticPattern::Checkerboard;
    throw std::invalid_argument("unknown synthetic pattern: " + name);
}

std::string pattern_name(SyntheticPattern pattern) {
    switch (pattern) {
        case SyntheticPattern::Linear: return "linear";
        case SyntheticPattern::Stripe: return "stripe";
        case SyntheticPattern::Saw: return "saw";
        case SyntheticPattern::Wedge: return "wedge";
        case SyntheticPattern::Checkerboard: return "checkerboard";
    }
    throw std::logic_error("unreachable");
}

namespace {

// Triangle wave with period 2 and range [-1,1].
double triangle(double u) {
    return 2.0 / M_PI * std::asin(std::sin(M_PI * u));
}

}  // namespace

double pattern_label(SyntheticPattern pattern, double x1, double x2,
                     const PatternGeometry& g) {
    switch (pattern) {
        case SyntheticPattern::Linear:
            return x1 + x2 > 0.0 ? 1.0 : 0.0;
        case SyntheticPattern::Stripe:
            return std::abs(x2) < g.stripe_half_width ? 1.0 : 0.0;
        case SyntheticPattern::Saw:
            return x2 > g.saw_amplitude * triangle(g.saw_frequency * x1) ? 1.0 : 0.0;
        case SyntheticPattern::Wedge:
            return std::abs(x2) < g.wedge_slope * x1 ? 1.0 : 0.0;
        case SyntheticPattern::Checkerboard: {
            auto cell = [&](double v) {
                int c = static_cast<int>(std::floor((v + 1.0) / 2.0 * g.board_cells));
                return std::clamp(c, 0, g.board_cells - 1);
            };
            return (cell(x1) + cell(x2)) % 2 == 0 ? 0.0 : 1.0;
        }
    }
    throw std::logic_error("unreachable");
}

Dataset generate_synthetic(SyntheticPattern pattern, std::size_t n, std::uint64_t seed,
                           const PatternGeometry& geometry) {
    if (n < 1) throw std::invalid_argument("generate_synthetic: n must be >= 1");
    constexpr std::size_t kFeatures = 5;
    auto rng = make_rng(seed, "synthetic");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    Dataset data;
    data.features.reserve(n);
    std::vector<double> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector row(kFeatures);
        for (auto& v : row) v = unit(rng);
        labels.push_back(pattern_label(pattern, row[0], row[1], geometry));
        data.features.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < kFeatures; ++j) data.names.push_back("x" + std::to_string(j + 1));
    data.labels = std::move(labels);
    data.provenance = "synthetic:" + pattern_name(pattern);
    return data;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    for (std::size_t i = 0; i < header.size(); ++i)
        for (std::size_t j = i + 1; j < header.size(); ++j)
            if (header[i] == header[j])
                throw std::runtime_error("load_csv: duplicate column name '" + header[i] + "'");

    std::ptrdiff_t label_idx = -1;
    if (!label_column.empty()) {
        auto it = std::find(header.begin(), header.end(), label_column);
        if (it == header.end())
            throw std::runtime_error("load_csv: label column '" + label_column + "' not found");
        label_idx = it - header.begin();
    }

    Dataset data;
    std::vector<double> labels;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_no;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> parsed;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= header.size())
                throw std::runtime_error("load_csv: ragged row " + std::to_string(row_no));
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                parsed.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv: non-numeric cell at row " +
                                         std::to_string(row_no) + ", column " + header[col]);
            }
            ++col;
        }
        if (col != header.size())
            throw std::runtime_error("load_csv: ragged row " + std::to_string(row_no));
        if (label_idx >= 0) {
            labels.push_back(parsed[static_cast<std::size_t>(label_idx)]);
            parsed.erase(parsed.begin() + label_idx);
        }
        data.features.push_back(std::move(parsed));
    }
    if (data.features.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    for (std::size_t i = 0; i < header.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == label_idx) continue;
        data.names.push_back(header[i]);
    }
    if (label_idx >= 0) data.labels = std::move(labels);
    data.provenance = "csv:" + path;
    return data;
}

void save_csv(const Dataset& data, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out.precision(17);

    const bool with_labels = data.labels.has_value() && !label_column.empty();
    for (std::size_t j = 0; j < data.names.size(); ++j) {
        if (j) out << ',';
        out << data.names[j];
    }
    if (with_labels) out << ',' << label_column;
    out << '\n';
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.features[i].size(); ++j) {
            if (j) out << ',';
            out << data.features[i][j];
        }
        if (with_labels) out << ',' << (*data.labels)[i];
        out << '\n';
    }
}

std::vector<double> background_means(const Dataset& data) {
    if (data.rows() == 0) throw std::invalid_argument("background_means: empty dataset");
    std::vector<double> means(data.cols(), 0.0);
    for (const auto& row : data.features)
        for (std::size_t j = 0; j < means.size(); ++j) means[j] += row[j];
    for (auto& v : means) v /= static_cast<double>(data.rows());
    return means;
}

Matrix generate_neighbors(const FeatureVector& x, std::size_t count, double sigma,
                          std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("generate_neighbors: sigma must be >= 0");
    if (count < 1) throw std::invalid_argument("generate_neighbors: count must be >= 1");
    auto rng = make_rng(seed, "neighbors");
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        FeatureVector h(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) h[i] = x[i] + sigma * noise(rng);
        out.push_back(std::move(h));
    }
    return out;
}

FeatureVector default_instance(std::size_t m) { return FeatureVector(m, 0.25); }

}  // namespace shapkit
