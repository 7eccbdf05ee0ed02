#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "recfact/predictor.hpp"

namespace recfact {

enum class EnsembleKind { kBlend, kVote, kBag, kStack };

const char* to_string(EnsembleKind kind) noexcept;
EnsembleKind parse_ensemble_kind(std::string_view name);

// predict = intercept + sum_m weight_m * member_m.predict. Blend, vote and bag
// weights lie on the simplex; stacking coefficients are unconstrained.
// recommend: vote ranks by member top-k counts, the rest score by predict.
class EnsemblePredictor final : public Predictor {
public:
    // `catalog` defaults to member 0's; when given it must share the members' id maps.
    EnsemblePredictor(EnsembleKind kind, std::vector<PredictorPtr> members, std::vector<double> weights,
                      double intercept = 0.0, std::shared_ptr<const Catalog> catalog = nullptr);

    const char* algorithm() const noexcept override { return "ensemble"; }
    double predict(std::size_t u, std::size_t i) const override;
    std::vector<ScoredItem> recommend(std::size_t u, std::size_t k) const override;

    EnsembleKind kind() const noexcept { return kind_; }
    const std::vector<PredictorPtr>& members() const noexcept { return members_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double intercept() const noexcept { return intercept_; }

private:
    EnsembleKind kind_;
    std::vector<PredictorPtr> members_;
    std::vector<double> weights_;
    double intercept_;
};

// Nonnegative weights with a positive sum, rescaled to sum to 1.
EnsemblePredictor make_blend(std::vector<PredictorPtr> members, std::vector<double> weights);

double blend_predict(const EnsemblePredictor& model, std::size_t u, std::size_t i);

// Items ranked by how many members put them in their own top-k; ties by mean
// member rank (absent counts as k), then item index. score = vote count.
std::vector<ScoredItem> vote_recommend(std::span<const PredictorPtr> members, std::size_t u, std::size_t k);

using MemberTrainer = std::function<PredictorPtr(const RatingDataset& sample, std::size_t member)>;

// B members, member b trained on bootstrap_resample(ds, derive_seed(seed, b)); uniform weights.
EnsemblePredictor bag_train(const MemberTrainer& trainer, const RatingDataset& ds, std::size_t members,
                            std::uint64_t seed);

inline constexpr double kStackRidge = 1e-8;

// Least squares with intercept on holdout triples (indices in the members'
// id space): (X^T X / N + ridge I) beta = X^T r / N, solved by Cholesky.
EnsemblePredictor stack_fit(std::vector<PredictorPtr> members, std::span<const Rating> holdout);

} // namespace recfact
