#include "shapkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shapkit {

std::string ComparisonResult::to_csv_row() const {
    std::ostringstream out;
    out.precision(17);
    out << concordance << ',' << euclidean << ',' << concordant << ',' << discordant << ','
        << tied << ',' << call_ratio << ',' << time_ratio;
    return out.str();
}

namespace {

struct PairCounts {
    std::uint64_t concordant = 0;
    std::uint64_t discordant = 0;
    std::uint64_t tied = 0;
};

PairCounts count_pairs(const std::vector<double>& reference,
                       const std::vector<double>& candidate) {
    if (reference.size() != candidate.size())
        throw std::invalid_argument("concordance: vector length mismatch");
    if (reference.size() < 2)
        throw std::invalid_argument("concordance: need at least 2 features");
    PairCounts counts;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        for (std::size_t j = i + 1; j < reference.size(); ++j) {
            const double dr = reference[i] - reference[j];
            const double dc = candidate[i] - candidate[j];
            if (dr == 0.0 || dc == 0.0) {
                ++counts.tied;
            } else if ((dr > 0.0) == (dc > 0.0)) {
                ++counts.concordant;
            } else {
                ++counts.discordant;
            }
        }
    }
    return counts;
}

std::vector<double> min_max_rescale(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    if (*lo == *hi) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / span;
    return out;
}

}  // namespace

double concordance_index(const std::vector<double>& reference,
                         const std::vector<double>& candidate) {
    const PairCounts counts = count_pairs(reference, candidate);
    const double total =
        static_cast<double>(counts.concordant + counts.discordant + counts.tied);
    return (static_cast<double>(counts.concordant) + 0.5 * static_cast<double>(counts.tied)) /
           total;
}

double normalized_euclidean(const std::vector<double>& reference,
                            const std::vector<double>& candidate) {
    if (reference.size() != candidate.size())
        throw std::invalid_argument("normalized_euclidean: vector length mismatch");
    if (reference.empty())
        throw std::invalid_argument("normalized_euclidean: empty vectors");
    const std::vector<double> a = min_max_rescale(reference);
    const std::vector<double> b = min_max_rescale(candidate);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::sqrt(d2) / std::sqrt(static_cast<double>(a.size()));
}

ComparisonResult compare_attributions(const std::vector<double>& reference,
                                      const std::vector<double>& candidate) {
    ComparisonResult result;
    const PairCounts counts = count_pairs(reference, candidate);
    result.concordant = counts.concordant;
    result.discordant = counts.discordant;
    result.tied = counts.tied;
    const double total =
        static_cast<double>(counts.concordant + counts.discordant + counts.tied);
    result.concordance =
        (static_cast<double>(counts.concordant) + 0.5 * static_cast<double>(counts.tied)) / total;
    result.euclidean = normalized_euclidean(reference, candidate);
    return result;
}

std::pair<double, double> cost_ratio(std::uint64_t calls_a, double time_a,
                                     std::uint64_t calls_b, double time_b) {
    if (calls_b == 0 || time_b <= 0.0)
        throw std::invalid_argument("cost_ratio: zero denominator");
    return {static_cast<double>(calls_a) / static_cast<double>(calls_b), time_a / time_b};
}

}  // namespace shapkit
