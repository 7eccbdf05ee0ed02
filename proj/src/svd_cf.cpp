#include "recfact/svd_cf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recfact/error.hpp"

namespace recfact {

SvdCfModel::SvdCfModel(DenseMatrix r_star, DenseMatrix mask, std::size_t rank, SimilarityMode mode,
                       std::size_t neighbors, std::vector<double> singular_values)
    : r_star_(std::move(r_star)),
      mask_(std::move(mask)),
      rank_(rank),
      mode_(mode),
      neighbors_(neighbors),
      singular_values_(std::move(singular_values)),
      similarity_(r_star_.cols(), r_star_.cols(), 0.0)
{
    require(rank_ >= 1, ErrorCode::kRange, "svd-cf: retained rank must be >= 1");
    for (double x : mask_.data())
        require(x == 0.0 || x == 1.0, ErrorCode::kInput, "svd-cf: mask entries must be 0 or 1");
    for (double x : r_star_.data())
        require(std::isfinite(x), ErrorCode::kInput, "svd-cf: reconstruction contains non-finite entries");

    const DenseMatrix masked = hadamard(r_star_, mask_);
    const std::size_t n = masked.cols();
    std::vector<std::vector<double>> columns(n);
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        columns[j] = masked.column(j);
        norms[j] = norm(columns[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = dot(columns[i], columns[j]);
            if (mode_ == SimilarityMode::kCosine)
                s = (norms[i] == 0.0 || norms[j] == 0.0) ? 0.0 : cosine(columns[i], columns[j]);
            similarity_(i, j) = s;
            similarity_(j, i) = s;
        }
}

SvdCfModel SvdCfModel::fit(const RatingDataset& ds, const SvdCfOptions& options)
{
    require(ds.kind() == FeedbackKind::kExplicit, ErrorCode::kArgument, "svd-cf: expects explicit ratings");
    const DenseRatings dense = to_dense(ds, options.dense_cap);
    const DenseMatrix filled = impute(dense.values, dense.mask, options.impute);
    const SvdResult full = svd(filled);

    std::size_t f = 0;
    if (const auto* e = std::get_if<EnergyRule>(&options.rank_rule))
        f = rank_by_energy(full.singular_values, e->threshold);
    else if (const auto* r = std::get_if<RatioRule>(&options.rank_rule))
        f = rank_by_ratio(full.singular_values, r->c);
    else
        f = std::get<FixedRank>(options.rank_rule).f;

    return SvdCfModel(truncate(full, f).reconstruct(), dense.mask, f, options.similarity, options.neighbors,
                      full.singular_values);
}

double SvdCfModel::masked_item_similarity(std::size_t i, std::size_t j) const
{
    require(i < num_items() && j < num_items(), ErrorCode::kRange, "svd-cf: item index out of range");
    require(i != j, ErrorCode::kContract, "svd-cf: similarity of an item with itself is not defined here");
    return similarity_(i, j);
}

std::vector<SvdCfModel::Weight> SvdCfModel::weights_for(std::size_t i) const
{
    std::vector<Weight> w;
    for (std::size_t j = 0; j < num_items(); ++j) {
        if (j == i)
            continue;
        const double s = similarity_(i, j);
        if (s > 0.0)
            w.push_back({j, s});
    }
    if (neighbors_ > 0 && w.size() > neighbors_) {
        std::stable_sort(w.begin(), w.end(),
                         [](const Weight& a, const Weight& b) { return a.similarity > b.similarity; });
        w.resize(neighbors_);
        std::sort(w.begin(), w.end(), [](const Weight& a, const Weight& b) { return a.item < b.item; });
    }
    return w;
}

double SvdCfModel::similarity_total(std::size_t i) const
{
    require(i < num_items(), ErrorCode::kRange, "svd-cf: item index out of range");
    double total = 0.0;
    for (const Weight& w : weights_for(i))
        total += w.similarity;
    return total;
}

Prediction SvdCfModel::predict(std::size_t u, std::size_t i) const
{
    require(u < num_users() && i < num_items(), ErrorCode::kRange, "svd-cf: index out of range");
    double total = 0.0;
    double weighted = 0.0;
    for (const Weight& w : weights_for(i)) {
        total += w.similarity;
        weighted += w.similarity * r_star_(u, w.item);
    }
    if (total > 0.0)
        return {weighted / total, kPredictionOk};

    double mean = 0.0;
    for (double x : r_star_.row(u))
        mean += x;
    return {mean / static_cast<double>(num_items()), kPredictionFallback};
}

std::vector<ScoredItem> SvdCfModel::recommend(std::size_t u, std::size_t k) const
{
    require(k >= 1, ErrorCode::kRange, "recommend: k must be >= 1");
    require(u < num_users(), ErrorCode::kRange, "svd-cf: user index out of range");
    std::vector<ScoredItem> out;
    for (std::size_t i = 0; i < num_items(); ++i)
        if (mask_(u, i) == 0.0)
            out.push_back({i, predict(u, i).value});
    std::sort(out.begin(), out.end(), [](const ScoredItem& a, const ScoredItem& b) {
        return a.score != b.score ? a.score > b.score : a.item < b.item;
    });
    if (out.size() > k)
        out.resize(k);
    return out;
}

int round_to_scale(double value, RatingScale scale)
{
    const double lo = std::ceil(scale.lo);
    const double hi = std::floor(scale.hi);
    return static_cast<int>(std::clamp(std::round(value), lo, hi));
}

} // namespace recfact
