#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recfact/factor_models.hpp"
#include "recfact/fm.hpp"
#include "recfact/predictor.hpp"
#include "recfact/ratings.hpp"
#include "recfact/svd_cf.hpp"

namespace recfact {

// Flat key=value settings shared by the config file and the CLI flags.
struct RunConfig {
    std::string algo = "funk";
    std::size_t factors = 10;
    double alpha = 0.01;
    double lambda = 0.02;
    std::size_t epochs = 20;
    std::uint64_t seed = 42;
    OptimizerKind optimizer = OptimizerKind::kSgd;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    UpdateOrder update = UpdateOrder::kSequential;
    FunkStrategy strategy = FunkStrategy::kAllFactors;
    bool freeze_implicit = false;

    ImputeStrategy impute = ImputeStrategy::kUser;
    RankRule rank_rule = EnergyRule{};
    SimilarityMode similarity = SimilarityMode::kPaperDot;
    std::size_t neighbors = 0; // svd: 0 = all items; itemcf: 0 = all items

    std::optional<double> neg_ratio; // implicit data: defaults to 3
    std::optional<FmLoss> loss;      // defaults to squared (explicit) or logistic (implicit)

    FeedbackKind kind = FeedbackKind::kExplicit;
    RatingScale scale;
    bool header = false;
    DuplicatePolicy duplicates = DuplicatePolicy::kKeepLast;

    // Throws kArgument for unknown keys (naming the closest known key) and bad values.
    void set(std::string_view key, std::string_view value);
    // '#' starts a comment; blank lines are skipped.
    void load(std::istream& in);
    void load_file(const std::string& path);

    CsvSchema schema() const { return {header, kind, scale, duplicates}; }
    TrainConfig train_config() const;

    static const std::vector<std::string>& keys();
};

std::size_t edit_distance(std::string_view a, std::string_view b);

// Trains the configured algorithm. For implicit data the dataset is first
// extended with negative samples (neg-ratio > 0).
PredictorPtr train_predictor(const RatingDataset& ds, const RunConfig& config, const EpochCallback& on_epoch = {});

} // namespace recfact
