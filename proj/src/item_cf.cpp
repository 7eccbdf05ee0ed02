#include <algorithm>
#include <numeric>
#include <string>

#include "recfact/error.hpp"
#include "recfact/factor_models.hpp"

namespace recfact {

DenseMatrix itemcf_similarity(const RatingDataset& ds)
{
    require(!ds.empty(), ErrorCode::kEmptyData, "itemcf: empty dataset");
    const std::size_t n = ds.num_items();
    const auto raters = ds.users_by_item();
    DenseMatrix w(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (raters[i].empty())
            continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            std::size_t common = 0;
            auto a = raters[i].begin();
            auto b = raters[j].begin();
            while (a != raters[i].end() && b != raters[j].end()) {
                if (*a < *b)
                    ++a;
                else if (*b < *a)
                    ++b;
                else {
                    ++common;
                    ++a;
                    ++b;
                }
            }
            w(i, j) = static_cast<double>(common) / static_cast<double>(raters[i].size());
        }
    }
    return w;
}

ItemCfModel::ItemCfModel(DenseMatrix weights, std::size_t neighbors, UserRatings ratings)
    : weights_(std::move(weights)), neighbors_(neighbors), ratings_(std::move(ratings))
{
    const std::size_t n = weights_.rows();
    require(weights_.cols() == n, ErrorCode::kShape, "itemcf: weight matrix must be square");
    require(neighbors_ >= 1, ErrorCode::kArgument, "itemcf: neighbourhood size K must be >= 1");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = weights_(i, j);
            require(x >= 0.0 && x <= 1.0, ErrorCode::kInput, "itemcf: weights must lie in [0, 1]");
            require(i != j || x == 0.0, ErrorCode::kInput, "itemcf: diagonal weights must be 0");
        }
    for (auto& row : ratings_) {
        std::sort(row.begin(), row.end());
        for (const auto& [item, value] : row)
            require(item < n, ErrorCode::kRange, "itemcf: rating refers to an unknown item");
    }

    top_.resize(n);
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j) {
        order.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (i != j)
                order.push_back(i);
        const std::size_t keep = std::min(neighbors_, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double wa = weights_(j, a);
                              const double wb = weights_(j, b);
                              return wa != wb ? wa > wb : a < b;
                          });
        top_[j].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
        std::sort(top_[j].begin(), top_[j].end());
    }
}

ItemCfModel ItemCfModel::fit(const RatingDataset& ds, std::size_t neighbors)
{
    UserRatings ratings(ds.num_users());
    for (const Rating& r : ds.ratings())
        ratings[r.user].emplace_back(r.item, r.value);
    return ItemCfModel(itemcf_similarity(ds), neighbors, std::move(ratings));
}

Prediction ItemCfModel::predict(std::size_t u, std::size_t j) const
{
    if (u >= num_users() || j >= num_items())
        fail(ErrorCode::kRange, "itemcf: index (" + std::to_string(u) + ", " + std::to_string(j) + ") out of range");
    const auto& history = ratings_[u];
    const auto& near = top_[j];
    double sum = 0.0;
    bool any = false;
    auto a = history.begin();
    auto b = near.begin();
    while (a != history.end() && b != near.end()) {
        if (a->first < *b)
            ++a;
        else if (*b < a->first)
            ++b;
        else {
            sum += weights_(j, a->first) * a->second;
            any = true;
            ++a;
            ++b;
        }
    }
    return {sum, any ? kPredictionOk : kPredictionEmptyNeighborhood};
}

} // namespace recfact
