#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace recfact {

// Both throw kEmptyData on empty input and kShape when lengths differ.
double rmse(std::span<const double> predicted, std::span<const double> truth);
double mae(std::span<const double> predicted, std::span<const double> truth);

struct TopNResult {
    std::size_t k = 0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t users = 0; // users with at least one held-out positive
};

// recommendations[u] is u's ranked list (only the first k entries count);
// positives[u] the held-out relevant items. Both metrics are macro-averaged
// over users with positives; precision divides hits by k.
TopNResult topn_metrics(const std::vector<std::vector<std::size_t>>& recommendations,
                        const std::vector<std::vector<std::size_t>>& positives, std::size_t k);

struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t pairs = 0;   // scored (user, item) pairs
    std::size_t skipped = 0; // test pairs naming an id unknown to the model
    std::vector<TopNResult> topn;
};

} // namespace recfact
