#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "recfact/factor_models.hpp"
#include "recfact/fm.hpp"
#include "recfact/ratings.hpp"
#include "recfact/svd_cf.hpp"

namespace recfact {

// Id maps and training-time observations shared by a trained model.
struct Catalog {
    IndexMap users;
    IndexMap items;
    FeedbackKind kind = FeedbackKind::kExplicit;
    RatingScale scale;
    std::vector<std::vector<std::size_t>> observed; // sorted items per user, excluded from recommend

    static Catalog from(const RatingDataset& ds);
    bool same_ids(const Catalog& other) const { return users == other.users && items == other.items; }
};

class Predictor {
public:
    explicit Predictor(std::shared_ptr<const Catalog> catalog);
    virtual ~Predictor() = default;

    virtual const char* algorithm() const noexcept = 0;
    virtual double predict(std::size_t u, std::size_t i) const = 0;

    // Top-k unobserved items by predict(), score descending, ties by item index.
    virtual std::vector<ScoredItem> recommend(std::size_t u, std::size_t k) const;

    const Catalog& catalog() const noexcept { return *catalog_; }
    const std::shared_ptr<const Catalog>& shared_catalog() const noexcept { return catalog_; }

protected:
    void check_pair(std::size_t u, std::size_t i) const;

private:
    std::shared_ptr<const Catalog> catalog_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

class SvdPredictor final : public Predictor {
public:
    SvdPredictor(std::shared_ptr<const Catalog> catalog, SvdCfModel model);
    const char* algorithm() const noexcept override { return "svd"; }
    double predict(std::size_t u, std::size_t i) const override;
    std::vector<ScoredItem> recommend(std::size_t u, std::size_t k) const override;
    const SvdCfModel& model() const noexcept { return model_; }

private:
    SvdCfModel model_;
};

// Funk-SVD or SVD++ depending on model.kind.
class FactorPredictor final : public Predictor {
public:
    FactorPredictor(std::shared_ptr<const Catalog> catalog, FactorModel model);
    const char* algorithm() const noexcept override;
    double predict(std::size_t u, std::size_t i) const override;
    const FactorModel& model() const noexcept { return model_; }

private:
    FactorModel model_;
};

class ItemCfPredictor final : public Predictor {
public:
    ItemCfPredictor(std::shared_ptr<const Catalog> catalog, ItemCfModel model);
    const char* algorithm() const noexcept override { return "itemcf"; }
    double predict(std::size_t u, std::size_t i) const override;
    const ItemCfModel& model() const noexcept { return model_; }

private:
    ItemCfModel model_;
};

// Ratings as FM input: user one-hot in field 0, item one-hot in field 1, each
// block with a trailing slot for ids outside the catalog.
FeatureEncoder rating_encoder(const Catalog& catalog);

// FM and FFM share the encoding; logistic models report sigmoid(y).
class FmPredictor final : public Predictor {
public:
    FmPredictor(std::shared_ptr<const Catalog> catalog, FmModel model, FmLoss loss);
    const char* algorithm() const noexcept override { return "fm"; }
    double predict(std::size_t u, std::size_t i) const override;
    const FmModel& model() const noexcept { return model_; }
    FmLoss loss() const noexcept { return loss_; }
    const FeatureEncoder& encoder() const noexcept { return encoder_; }

private:
    FmModel model_;
    FmLoss loss_;
    FeatureEncoder encoder_;
};

class FfmPredictor final : public Predictor {
public:
    FfmPredictor(std::shared_ptr<const Catalog> catalog, FfmModel model, FmLoss loss);
    const char* algorithm() const noexcept override { return "ffm"; }
    double predict(std::size_t u, std::size_t i) const override;
    const FfmModel& model() const noexcept { return model_; }
    FmLoss loss() const noexcept { return loss_; }
    const FeatureEncoder& encoder() const noexcept { return encoder_; }

private:
    FfmModel model_;
    FmLoss loss_;
    FeatureEncoder encoder_;
};

} // namespace recfact
