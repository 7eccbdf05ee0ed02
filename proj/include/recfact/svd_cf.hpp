#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "recfact/linalg.hpp"
#include "recfact/ratings.hpp"

namespace recfact {

enum class SimilarityMode {
    kPaperDot, // unnormalized dot product of masked R* columns
    kCosine,   // cosine of masked R* columns
};

struct EnergyRule {
    double threshold = 0.95;
};
struct RatioRule {
    double c = 10.0;
};
struct FixedRank {
    std::size_t f = 2;
};
using RankRule = std::variant<EnergyRule, RatioRule, FixedRank>;

// Bits reported alongside a prediction.
enum PredictionFlag : unsigned {
    kPredictionOk = 0,
    kPredictionFallback = 1u << 0,          // zero similarity mass; used the row mean
    kPredictionColdStart = 1u << 1,         // unknown user or item
    kPredictionEmptyNeighborhood = 1u << 2, // no overlap between history and neighbours
};

struct Prediction {
    double value = 0.0;
    unsigned flags = kPredictionOk;
};

struct ScoredItem {
    std::size_t item = 0;
    double score = 0.0;

    bool operator==(const ScoredItem&) const = default;
};

struct SvdCfOptions {
    ImputeStrategy impute = ImputeStrategy::kUser;
    RankRule rank_rule = EnergyRule{};
    SimilarityMode similarity = SimilarityMode::kPaperDot;
    std::size_t neighbors = 0; // top-K neighbourhood; 0 = all items
    std::size_t dense_cap = kDefaultDenseCap;
};

// Impute -> decompose -> truncate -> reconstruct, then item-based prediction
// over the masked columns of the reconstruction.
class SvdCfModel {
public:
    SvdCfModel(DenseMatrix r_star, DenseMatrix mask, std::size_t rank, SimilarityMode mode = SimilarityMode::kPaperDot,
               std::size_t neighbors = 0, std::vector<double> singular_values = {});

    static SvdCfModel fit(const RatingDataset& ds, const SvdCfOptions& options = {});

    const DenseMatrix& r_star() const noexcept { return r_star_; }
    const DenseMatrix& mask() const noexcept { return mask_; }
    std::size_t rank() const noexcept { return rank_; }
    SimilarityMode similarity_mode() const noexcept { return mode_; }
    std::size_t neighbors() const noexcept { return neighbors_; }
    const std::vector<double>& singular_values() const noexcept { return singular_values_; }

    std::size_t num_users() const noexcept { return r_star_.rows(); }
    std::size_t num_items() const noexcept { return r_star_.cols(); }

    double masked_item_similarity(std::size_t i, std::size_t j) const;

    // Sum of the similarity weights that enter predict(u, i).
    double similarity_total(std::size_t i) const;

    Prediction predict(std::size_t u, std::size_t i) const;

    // Top-k unobserved items for u, score descending, ties by item index.
    std::vector<ScoredItem> recommend(std::size_t u, std::size_t k) const;

private:
    struct Weight {
        std::size_t item;
        double similarity;
    };
    std::vector<Weight> weights_for(std::size_t i) const;

    DenseMatrix r_star_;
    DenseMatrix mask_;
    std::size_t rank_;
    SimilarityMode mode_;
    std::size_t neighbors_;
    std::vector<double> singular_values_;
    DenseMatrix similarity_; // n x n masked-column similarities; diagonal unused
};

// Nearest integer (half away from zero), clamped to the scale.
int round_to_scale(double value, RatingScale scale = {});

} // namespace recfact
