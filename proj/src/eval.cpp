#include "recfact/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recfact/error.hpp"

namespace recfact {

namespace {

void check_pairs(std::span<const double> predicted, std::span<const double> truth)
{
    require(!truth.empty(), ErrorCode::kEmptyData, "no prediction pairs to score");
    require(predicted.size() == truth.size(), ErrorCode::kShape,
            std::to_string(predicted.size()) + " predictions for " + std::to_string(truth.size()) + " ratings");
}

} // namespace

double rmse(std::span<const double> predicted, std::span<const double> truth)
{
    check_pairs(predicted, truth);
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = predicted[i] - truth[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

double mae(std::span<const double> predicted, std::span<const double> truth)
{
    check_pairs(predicted, truth);
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        sum += std::abs(predicted[i] - truth[i]);
    return sum / static_cast<double>(truth.size());
}

TopNResult topn_metrics(const std::vector<std::vector<std::size_t>>& recommendations,
                        const std::vector<std::vector<std::size_t>>& positives, std::size_t k)
{
    require(k >= 1, ErrorCode::kRange, "top-N: k must be >= 1");
    TopNResult out{k, 0.0, 0.0, 0};
    std::vector<std::size_t> relevant;
    for (std::size_t u = 0; u < positives.size(); ++u) {
        if (positives[u].empty())
            continue;
        relevant.assign(positives[u].begin(), positives[u].end());
        std::sort(relevant.begin(), relevant.end());
        relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
        std::size_t hits = 0;
        if (u < recommendations.size()) {
            const auto& recs = recommendations[u];
            const std::size_t n = std::min(k, recs.size());
            for (std::size_t r = 0; r < n; ++r)
                hits += std::binary_search(relevant.begin(), relevant.end(), recs[r]) ? 1 : 0;
        }
        out.precision += static_cast<double>(hits) / static_cast<double>(k);
        out.recall += static_cast<double>(hits) / static_cast<double>(relevant.size());
        ++out.users;
    }
    require(out.users > 0, ErrorCode::kEmptyData, "top-N: no user has held-out positives");
    out.precision /= static_cast<double>(out.users);
    out.recall /= static_cast<double>(out.users);
    return out;
}

} // namespace recfact
