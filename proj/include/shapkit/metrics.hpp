#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shapkit {

struct ComparisonResult {
    double concordance = 0.0;         // C in [0,1]
    double euclidean = 0.0;           // normalized distance E in [0,1]
    std::uint64_t concordant = 0;
    std::uint64_t discordant = 0;
    std::uint64_t tied = 0;
    double call_ratio = 0.0;
    double time_ratio = 0.0;

    std::string to_csv_row() const;
};

// Proportion of concordant feature pairs between two attribution vectors;
// ties on either side earn half credit.
double concordance_index(const std::vector<double>& reference,
                         const std::vector<double>& candidate);

// L2 distance between the two min-max rescaled vectors, divided by sqrt(m).
// Constant vectors map to all-0.5 (degenerate scale).
double normalized_euclidean(const std::vector<double>& reference,
                            const std::vector<double>& candidate);

ComparisonResult compare_attributions(const std::vector<double>& reference,
                                      const std::vector<double>& candidate);

std::pair<double, double> cost_ratio(std::uint64_t calls_a, double time_a,
                                     std::uint64_t calls_b, double time_b);

}  // namespace shapkit
