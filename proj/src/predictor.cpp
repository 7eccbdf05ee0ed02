#include "recfact/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recfact/error.hpp"

namespace recfact {

Catalog Catalog::from(const RatingDataset& ds)
{
    return {ds.users(), ds.items(), ds.kind(), ds.scale(), ds.items_by_user()};
}

Predictor::Predictor(std::shared_ptr<const Catalog> catalog) : catalog_(std::move(catalog))
{
    require(catalog_ != nullptr, ErrorCode::kArgument, "predictor needs a catalog");
    require(catalog_->observed.size() == catalog_->users.size(), ErrorCode::kShape,
            "catalog: one observed list per user required");
}

void Predictor::check_pair(std::size_t u, std::size_t i) const
{
    if (u >= catalog_->users.size() || i >= catalog_->items.size())
        fail(ErrorCode::kRange, "index (" + std::to_string(u) + ", " + std::to_string(i) + ") out of range");
}

std::vector<ScoredItem> Predictor::recommend(std::size_t u, std::size_t k) const
{
    require(k >= 1, ErrorCode::kRange, "recommend: k must be >= 1");
    require(u < catalog_->users.size(), ErrorCode::kRange, "recommend: user index out of range");
    const auto& seen = catalog_->observed[u];
    std::vector<ScoredItem> out;
    for (std::size_t i = 0; i < catalog_->items.size(); ++i)
        if (!std::binary_search(seen.begin(), seen.end(), i))
            out.push_back({i, predict(u, i)});
    const std::size_t keep = std::min(k, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                      [](const ScoredItem& a, const ScoredItem& b) {
                          return a.score != b.score ? a.score > b.score : a.item < b.item;
                      });
    out.resize(keep);
    return out;
}

SvdPredictor::SvdPredictor(std::shared_ptr<const Catalog> catalog, SvdCfModel model)
    : Predictor(std::move(catalog)), model_(std::move(model))
{
    require(model_.num_users() == this->catalog().users.size() && model_.num_items() == this->catalog().items.size(),
            ErrorCode::kShape, "svd model shape disagrees with its id maps");
}

double SvdPredictor::predict(std::size_t u, std::size_t i) const { return model_.predict(u, i).value; }

std::vector<ScoredItem> SvdPredictor::recommend(std::size_t u, std::size_t k) const { return model_.recommend(u, k); }

FactorPredictor::FactorPredictor(std::shared_ptr<const Catalog> catalog, FactorModel model)
    : Predictor(std::move(catalog)), model_(std::move(model))
{
    model_.validate();
    require(model_.num_users() == this->catalog().users.size() && model_.num_items() == this->catalog().items.size(),
            ErrorCode::kShape, "factor model shape disagrees with its id maps");
}

const char* FactorPredictor::algorithm() const noexcept
{
    return model_.kind == FactorKind::kFunk ? "funk" : "svdpp";
}

double FactorPredictor::predict(std::size_t u, std::size_t i) const
{
    return model_.kind == FactorKind::kFunk ? funk_predict(model_, u, i) : svdpp_predict(model_, u, i);
}

ItemCfPredictor::ItemCfPredictor(std::shared_ptr<const Catalog> catalog, ItemCfModel model)
    : Predictor(std::move(catalog)), model_(std::move(model))
{
    require(model_.num_users() == this->catalog().users.size() && model_.num_items() == this->catalog().items.size(),
            ErrorCode::kShape, "itemcf model shape disagrees with its id maps");
}

double ItemCfPredictor::predict(std::size_t u, std::size_t i) const { return model_.predict(u, i).value; }

FeatureEncoder rating_encoder(const Catalog& catalog)
{
    return FeatureEncoder({{"user", ColumnKind::kCategorical, catalog.users.tokens()},
                           {"item", ColumnKind::kCategorical, catalog.items.tokens()}});
}

namespace {

double link(double y, FmLoss loss) { return loss == FmLoss::kLogistic ? 1.0 / (1.0 + std::exp(-y)) : y; }

} // namespace

FmPredictor::FmPredictor(std::shared_ptr<const Catalog> catalog, FmModel model, FmLoss loss)
    : Predictor(std::move(catalog)), model_(std::move(model)), loss_(loss), encoder_(rating_encoder(this->catalog()))
{
    model_.validate();
    require(model_.dimension() == encoder_.dimension(), ErrorCode::kShape,
            "fm model dimension disagrees with the rating encoding");
}

double FmPredictor::predict(std::size_t u, std::size_t i) const
{
    check_pair(u, i);
    const std::size_t pos[2] = {u, i};
    return link(fm_predict_fast(model_, encoder_.encode_positions(pos)), loss_);
}

FfmPredictor::FfmPredictor(std::shared_ptr<const Catalog> catalog, FfmModel model, FmLoss loss)
    : Predictor(std::move(catalog)), model_(std::move(model)), loss_(loss), encoder_(rating_encoder(this->catalog()))
{
    model_.validate();
    require(model_.dimension() == encoder_.dimension() && model_.fields == encoder_.num_fields(), ErrorCode::kShape,
            "ffm model shape disagrees with the rating encoding");
}

double FfmPredictor::predict(std::size_t u, std::size_t i) const
{
    check_pair(u, i);
    const std::size_t pos[2] = {u, i};
    return link(ffm_predict(model_, encoder_.encode_positions(pos)), loss_);
}

} // namespace recfact
