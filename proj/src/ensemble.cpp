#include "recfact/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "recfact/error.hpp"
#include "recfact/random.hpp"

namespace recfact {

const char* to_string(EnsembleKind kind) noexcept
{
    switch (kind) {
    case EnsembleKind::kBlend: return "blend";
    case EnsembleKind::kVote: return "vote";
    case EnsembleKind::kBag: return "bag";
    case EnsembleKind::kStack: return "stack";
    }
    return "blend";
}

EnsembleKind parse_ensemble_kind(std::string_view name)
{
    for (EnsembleKind k : {EnsembleKind::kBlend, EnsembleKind::kVote, EnsembleKind::kBag, EnsembleKind::kStack})
        if (name == to_string(k))
            return k;
    fail(ErrorCode::kFormat, "unknown ensemble kind '" + std::string(name) + "'");
}

namespace {

std::shared_ptr<const Catalog> first_catalog(const std::vector<PredictorPtr>& members,
                                             std::shared_ptr<const Catalog> override = nullptr)
{
    require(!members.empty(), ErrorCode::kArgument, "ensemble needs at least one member");
    for (std::size_t m = 0; m < members.size(); ++m) {
        require(members[m] != nullptr, ErrorCode::kArgument, "ensemble member " + std::to_string(m) + " is null");
        require(members[m]->catalog().same_ids(members[0]->catalog()), ErrorCode::kValidation,
                "ensemble member " + std::to_string(m) + " has user/item id maps that differ from member 0");
    }
    if (!override)
        return members[0]->shared_catalog();
    require(override->same_ids(members[0]->catalog()), ErrorCode::kValidation,
            "ensemble catalog has id maps that differ from its members");
    return override;
}

template <class F>
auto member_call(std::size_t m, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        fail(e.code(), "ensemble member " + std::to_string(m) + ": " + e.what());
    }
}

} // namespace

EnsemblePredictor::EnsemblePredictor(EnsembleKind kind, std::vector<PredictorPtr> members, std::vector<double> weights,
                                     double intercept, std::shared_ptr<const Catalog> catalog)
    : Predictor(first_catalog(members, std::move(catalog))),
      kind_(kind),
      members_(std::move(members)),
      weights_(std::move(weights)),
      intercept_(intercept)
{
    require(weights_.size() == members_.size(), ErrorCode::kShape, "ensemble: one weight per member required");
    require(std::isfinite(intercept_), ErrorCode::kInput, "ensemble: intercept is not finite");
    for (double w : weights_)
        require(std::isfinite(w), ErrorCode::kInput, "ensemble: weights must be finite");
    if (kind_ != EnsembleKind::kStack) {
        double sum = 0.0;
        for (double w : weights_) {
            require(w >= 0.0, ErrorCode::kInput, "ensemble: weights must be >= 0");
            sum += w;
        }
        require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::kInput, "ensemble: weights must sum to 1");
        require(intercept_ == 0.0, ErrorCode::kInput, "ensemble: only stacking carries an intercept");
    }
}

double EnsemblePredictor::predict(std::size_t u, std::size_t i) const
{
    check_pair(u, i);
    double y = intercept_;
    for (std::size_t m = 0; m < members_.size(); ++m)
        if (weights_[m] != 0.0 || kind_ == EnsembleKind::kStack)
            y += weights_[m] * member_call(m, [&] { return members_[m]->predict(u, i); });
    return y;
}

std::vector<ScoredItem> EnsemblePredictor::recommend(std::size_t u, std::size_t k) const
{
    if (kind_ == EnsembleKind::kVote)
        return vote_recommend(members_, u, k);
    return Predictor::recommend(u, k);
}

EnsemblePredictor make_blend(std::vector<PredictorPtr> members, std::vector<double> weights)
{
    require(weights.size() == members.size(), ErrorCode::kShape, "blend: one weight per member required");
    double sum = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, ErrorCode::kInput, "blend: weights must be finite and >= 0");
        sum += w;
    }
    require(sum > 0.0, ErrorCode::kInput, "blend: weights must not all be zero");
    for (double& w : weights)
        w /= sum;
    return EnsemblePredictor(EnsembleKind::kBlend, std::move(members), std::move(weights));
}

double blend_predict(const EnsemblePredictor& model, std::size_t u, std::size_t i) { return model.predict(u, i); }

std::vector<ScoredItem> vote_recommend(std::span<const PredictorPtr> members, std::size_t u, std::size_t k)
{
    require(k >= 1, ErrorCode::kRange, "vote: k must be >= 1");
    struct Tally {
        std::size_t votes = 0;
        std::size_t rank_sum = 0; // ranks are 0-based
        std::size_t present = 0;
    };
    std::map<std::size_t, Tally> tally;
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto top = member_call(m, [&] { return members[m]->recommend(u, k); });
        for (std::size_t r = 0; r < top.size(); ++r) {
            Tally& t = tally[top[r].item];
            ++t.votes;
            t.rank_sum += r;
            ++t.present;
        }
    }
    struct Row {
        std::size_t item;
        std::size_t votes;
        double mean_rank;
    };
    std::vector<Row> rows;
    const double n = static_cast<double>(members.size());
    for (const auto& [item, t] : tally) {
        const double absent = static_cast<double>(members.size() - t.present) * static_cast<double>(k);
        rows.push_back({item, t.votes, (static_cast<double>(t.rank_sum) + absent) / n});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.votes != b.votes)
            return a.votes > b.votes;
        if (a.mean_rank != b.mean_rank)
            return a.mean_rank < b.mean_rank;
        return a.item < b.item;
    });
    std::vector<ScoredItem> out;
    for (std::size_t r = 0; r < rows.size() && r < k; ++r)
        out.push_back({rows[r].item, static_cast<double>(rows[r].votes)});
    return out;
}

EnsemblePredictor bag_train(const MemberTrainer& trainer, const RatingDataset& ds, std::size_t members,
                            std::uint64_t seed)
{
    require(members >= 1, ErrorCode::kArgument, "bag: member count B must be >= 1");
    require(static_cast<bool>(trainer), ErrorCode::kArgument, "bag: no trainer given");
    std::vector<PredictorPtr> trained;
    for (std::size_t b = 0; b < members; ++b) {
        const RatingDataset sample = bootstrap_resample(ds, derive_seed(seed, b));
        trained.push_back(member_call(b, [&] { return trainer(sample, b); }));
    }
    std::vector<double> weights(members, 1.0 / static_cast<double>(members));
    return EnsemblePredictor(EnsembleKind::kBag, std::move(trained), std::move(weights), 0.0,
                             std::make_shared<const Catalog>(Catalog::from(ds)));
}

EnsemblePredictor stack_fit(std::vector<PredictorPtr> members, std::span<const Rating> holdout)
{
    first_catalog(members);
    const std::size_t m = members.size();
    require(holdout.size() >= m, ErrorCode::kEmptyData,
            "stack: need at least " + std::to_string(m) + " holdout ratings, got " + std::to_string(holdout.size()));
    const std::size_t d = m + 1; // intercept first
    std::vector<double> gram(d * d, 0.0);
    std::vector<double> rhs(d, 0.0);
    std::vector<double> x(d);
    for (const Rating& r : holdout) {
        x[0] = 1.0;
        for (std::size_t j = 0; j < m; ++j)
            x[j + 1] = member_call(j, [&] { return members[j]->predict(r.user, r.item); });
        for (std::size_t a = 0; a < d; ++a) {
            rhs[a] += x[a] * r.value;
            for (std::size_t b = 0; b < d; ++b)
                gram[a * d + b] += x[a] * x[b];
        }
    }
    const double n = static_cast<double>(holdout.size());
    for (double& g : gram)
        g /= n;
    for (double& v : rhs)
        v /= n;
    for (std::size_t a = 0; a < d; ++a)
        gram[a * d + a] += kStackRidge;

    // Cholesky: gram = L L^T, L stored in the lower triangle.
    for (std::size_t j = 0; j < d; ++j) {
        double diag = gram[j * d + j];
        for (std::size_t k = 0; k < j; ++k)
            diag -= gram[j * d + k] * gram[j * d + k];
        if (!(diag > 0.0) || !std::isfinite(diag))
            fail(ErrorCode::kConditioning, "stack: member predictions are rank-deficient beyond ridge damping");
        const double l = std::sqrt(diag);
        gram[j * d + j] = l;
        for (std::size_t i = j + 1; i < d; ++i) {
            double s = gram[i * d + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= gram[i * d + k] * gram[j * d + k];
            gram[i * d + j] = s / l;
        }
    }
    std::vector<double> beta(rhs);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            beta[i] -= gram[i * d + k] * beta[k];
        beta[i] /= gram[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
        for (std::size_t k = i + 1; k < d; ++k)
            beta[i] -= gram[k * d + i] * beta[k];
        beta[i] /= gram[i * d + i];
    }
    for (double b : beta)
        require(std::isfinite(b), ErrorCode::kConditioning, "stack: coefficients are not finite");
    return EnsemblePredictor(EnsembleKind::kStack, std::move(members), std::vector<double>(beta.begin() + 1, beta.end()),
                             beta[0]);
}

} // namespace recfact
