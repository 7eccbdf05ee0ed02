#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "recfact/linalg.hpp"
#include "recfact/optim.hpp"
#include "recfact/ratings.hpp"
#include "recfact/svd_cf.hpp"

namespace recfact {

enum class FactorKind { kFunk, kSvdPlusPlus };

// Within the per-factor loop, kSequential lets the q update read the p value
// written one statement earlier; kSimultaneous computes both from old values.
enum class UpdateOrder { kSequential, kSimultaneous };

// kAllFactors updates every k per rating. kFeatureWise trains one feature at a
// time for `epochs` passes against cached residuals, then freezes it.
enum class FunkStrategy { kAllFactors, kFeatureWise };

struct TrainConfig {
    std::size_t factors = 10;
    double alpha = 0.01;
    double lambda = 0.02;
    std::size_t epochs = 20;
    std::uint64_t seed = 42;
    OptimizerKind optimizer = OptimizerKind::kSgd;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    UpdateOrder update_order = UpdateOrder::kSequential;
    FunkStrategy strategy = FunkStrategy::kAllFactors;
    bool freeze_implicit = false; // SVD++ only: hold Y at zero

    OptimizerConfig optimizer_config() const { return {optimizer, alpha, beta1, beta2, epsilon}; }
    void validate() const;
};

// Latent factor model. Row u of `p` is p_u, row i of `q` is q_i.
struct FactorModel {
    FactorKind kind = FactorKind::kFunk;
    DenseMatrix p;
    DenseMatrix q;

    // SVD++ block
    double mu = 0.0;
    std::vector<double> user_bias;
    std::vector<double> item_bias;
    std::optional<DenseMatrix> y;
    std::vector<std::vector<std::size_t>> implicit_sets; // N(u), sorted

    std::size_t factors() const noexcept { return p.cols(); }
    std::size_t num_users() const noexcept { return p.rows(); }
    std::size_t num_items() const noexcept { return q.rows(); }

    void validate() const;
};

struct FactorGradient {
    DenseMatrix p;
    DenseMatrix q;
    std::vector<double> user_bias;
    std::vector<double> item_bias;
    std::optional<DenseMatrix> y;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

struct FactorTrainResult {
    FactorModel model;
    std::vector<double> rmse_trace; // training RMSE after each epoch
};

// P and Q entries drawn uniform(0,1)/sqrt(f), P first, row-major.
FactorModel init_funk_model(std::size_t users, std::size_t items, std::size_t factors, std::uint64_t seed);

double funk_predict(const FactorModel& model, std::size_t u, std::size_t i);

// sum over triples of (r - p_u.q_i)^2 + lambda (|p_u|^2 + |q_i|^2)
double funk_loss(const FactorModel& model, std::span<const Rating> triples, double lambda);
FactorGradient funk_loss_gradient(const FactorModel& model, std::span<const Rating> triples, double lambda);

FactorTrainResult funk_train(const RatingDataset& ds, const TrainConfig& config, const EpochCallback& on_epoch = {});

// Continues training from `model` over `triples` (dataset order).
FactorTrainResult funk_train_from(FactorModel model, std::span<const Rating> triples, const TrainConfig& config,
                                  const EpochCallback& on_epoch = {});

double training_rmse(const FactorModel& model, std::span<const Rating> triples);

// P, Q, then Y as in init_funk_model; biases zero; mu and N(u) from `ds`.
FactorModel init_svdpp_model(const RatingDataset& ds, std::size_t factors, std::uint64_t seed,
                             bool freeze_implicit = false);

// (1/sqrt|N(u)|) q_i . sum_{j in N(u)} y_j ; zero when N(u) is empty.
double svdpp_implicit_predict(const FactorModel& model, std::size_t u, std::size_t i);

// mu + b_u + b_i + q_i . (p_u + |N(u)|^-1/2 sum y_j). Missing user or item
// takes the cold-start path: mu plus whichever bias is known.
Prediction svdpp_predict(const FactorModel& model, std::optional<std::size_t> u, std::optional<std::size_t> i);
double svdpp_predict(const FactorModel& model, std::size_t u, std::size_t i);

// sum over triples of e^2 + lambda (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2 + sum_{j in N(u)} |y_j|^2)
double svdpp_loss(const FactorModel& model, std::span<const Rating> triples, double lambda);
FactorGradient svdpp_loss_gradient(const FactorModel& model, std::span<const Rating> triples, double lambda);

FactorTrainResult svdpp_train(const RatingDataset& ds, const TrainConfig& config, const EpochCallback& on_epoch = {});
FactorTrainResult svdpp_train_from(FactorModel model, std::span<const Rating> triples, const TrainConfig& config,
                                   const EpochCallback& on_epoch = {});

// Co-occurrence item similarity w_ij = |N(i) & N(j)| / |N(i)| with top-K
// neighbourhood prediction p_uj = sum_{i in N(u) & S(j,K)} w_ji r_ui.
class ItemCfModel {
public:
    using UserRatings = std::vector<std::vector<std::pair<std::size_t, double>>>;

    ItemCfModel(DenseMatrix weights, std::size_t neighbors, UserRatings ratings);

    static ItemCfModel fit(const RatingDataset& ds, std::size_t neighbors);

    const DenseMatrix& weights() const noexcept { return weights_; }
    std::size_t neighbors() const noexcept { return neighbors_; }
    const UserRatings& user_ratings() const noexcept { return ratings_; }
    std::size_t num_users() const noexcept { return ratings_.size(); }
    std::size_t num_items() const noexcept { return weights_.rows(); }

    // S(j, K): the K items with largest w_ji, ties by item index.
    std::span<const std::size_t> neighborhood(std::size_t j) const { return top_.at(j); }

    Prediction predict(std::size_t u, std::size_t j) const;

private:
    DenseMatrix weights_;
    std::size_t neighbors_;
    UserRatings ratings_;
    std::vector<std::vector<std::size_t>> top_;
};

DenseMatrix itemcf_similarity(const RatingDataset& ds);

} // namespace recfact
