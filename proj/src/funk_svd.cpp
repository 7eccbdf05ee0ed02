#include <cmath>
#include <string>

#include "epoch_guard.hpp"
#include "recfact/error.hpp"
#include "recfact/factor_models.hpp"
#include "recfact/random.hpp"

namespace recfact {

void TrainConfig::validate() const
{
    require(factors >= 1, ErrorCode::kArgument, "factors must be >= 1");
    require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::kArgument, "alpha must be > 0");
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kArgument, "lambda must be >= 0");
    require(epochs >= 1, ErrorCode::kArgument, "epochs must be >= 1");
}

void FactorModel::validate() const
{
    require(p.cols() == q.cols(), ErrorCode::kShape, "factor model: P and Q disagree on the latent dimension");
    for (double x : p.data())
        require(std::isfinite(x), ErrorCode::kInput, "factor model: non-finite entry in P");
    for (double x : q.data())
        require(std::isfinite(x), ErrorCode::kInput, "factor model: non-finite entry in Q");
    if (kind == FactorKind::kFunk) {
        require(!y && user_bias.empty() && item_bias.empty(), ErrorCode::kFormat,
                "factor model: Funk model carries SVD++ parameters");
        return;
    }
    require(y.has_value(), ErrorCode::kFormat, "factor model: SVD++ model without Y");
    require(y->rows() == num_items() && y->cols() == factors(), ErrorCode::kShape, "factor model: Y shape");
    require(user_bias.size() == num_users() && item_bias.size() == num_items(), ErrorCode::kShape,
            "factor model: bias lengths");
    require(implicit_sets.size() == num_users(), ErrorCode::kShape, "factor model: N(u) count");
    for (const auto& set : implicit_sets)
        for (std::size_t j : set)
            require(j < num_items(), ErrorCode::kRange, "factor model: N(u) refers to an unknown item");
}

FactorModel init_funk_model(std::size_t users, std::size_t items, std::size_t factors, std::uint64_t seed)
{
    require(users >= 1 && items >= 1 && factors >= 1, ErrorCode::kArgument, "init: empty model dimensions");
    Rng rng(seed);
    const double root = std::sqrt(static_cast<double>(factors));
    FactorModel model{FactorKind::kFunk, DenseMatrix(users, factors), DenseMatrix(items, factors), 0.0, {}, {}, std::nullopt, {}};
    for (double& x : model.p.data())
        x = rng.uniform() / root;
    for (double& x : model.q.data())
        x = rng.uniform() / root;
    return model;
}

double funk_predict(const FactorModel& model, std::size_t u, std::size_t i)
{
    if (u >= model.num_users() || i >= model.num_items())
        fail(ErrorCode::kRange, "funk_predict: index (" + std::to_string(u) + ", " + std::to_string(i) + ") out of range");
    return dot(model.p.row(u), model.q.row(i));
}

double funk_loss(const FactorModel& model, std::span<const Rating> triples, double lambda)
{
    double loss = 0.0;
    for (const Rating& r : triples) {
        const double e = r.value - funk_predict(model, r.user, r.item);
        const auto pu = model.p.row(r.user);
        const auto qi = model.q.row(r.item);
        loss += e * e + lambda * (dot(pu, pu) + dot(qi, qi));
    }
    return loss;
}

FactorGradient funk_loss_gradient(const FactorModel& model, std::span<const Rating> triples, double lambda)
{
    const std::size_t f = model.factors();
    FactorGradient g{DenseMatrix(model.num_users(), f), DenseMatrix(model.num_items(), f), {}, {}, std::nullopt};
    for (const Rating& r : triples) {
        const double e = r.value - funk_predict(model, r.user, r.item);
        for (std::size_t k = 0; k < f; ++k) {
            g.p(r.user, k) += -2.0 * e * model.q(r.item, k) + 2.0 * lambda * model.p(r.user, k);
            g.q(r.item, k) += -2.0 * e * model.p(r.user, k) + 2.0 * lambda * model.q(r.item, k);
        }
    }
    return g;
}

double training_rmse(const FactorModel& model, std::span<const Rating> triples)
{
    if (triples.empty())
        return 0.0;
    double sum = 0.0;
    for (const Rating& r : triples) {
        const double pred = model.kind == FactorKind::kFunk ? funk_predict(model, r.user, r.item)
                                                            : svdpp_predict(model, r.user, r.item);
        const double e = r.value - pred;
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(triples.size()));
}

namespace {

void record_epoch(FactorTrainResult& result, std::size_t epoch, double rmse, const EpochCallback& on_epoch)
{
    if (!std::isfinite(rmse))
        detail::diverged(epoch);
    result.rmse_trace.push_back(rmse);
    if (on_epoch)
        on_epoch(epoch, rmse);
}

void train_all_factors(FactorTrainResult& result, std::span<const Rating> triples, const TrainConfig& config,
                       const EpochCallback& on_epoch)
{
    FactorModel& model = result.model;
    const std::size_t f = model.factors();
    const double lambda = config.lambda;
    Optimizer opt(config.optimizer_config());
    const std::size_t tp = opt.add_tensor("P", model.num_users() * f);
    const std::size_t tq = opt.add_tensor("Q", model.num_items() * f);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::guard_epoch(epoch, [&] {
            for (const Rating& r : triples) {
                auto pu = model.p.row(r.user);
                auto qi = model.q.row(r.item);
                const double err = r.value - dot(pu, qi);
                if (!std::isfinite(err))
                    detail::diverged(epoch);
                const std::size_t pbase = r.user * f;
                const std::size_t qbase = r.item * f;
                for (std::size_t k = 0; k < f; ++k) {
                    if (config.update_order == UpdateOrder::kSequential) {
                        pu[k] = opt.update(tp, pbase + k, pu[k], -(qi[k] * err - lambda * pu[k]));
                        qi[k] = opt.update(tq, qbase + k, qi[k], -(pu[k] * err - lambda * qi[k]));
                    } else {
                        const double gp = -(qi[k] * err - lambda * pu[k]);
                        const double gq = -(pu[k] * err - lambda * qi[k]);
                        pu[k] = opt.update(tp, pbase + k, pu[k], gp);
                        qi[k] = opt.update(tq, qbase + k, qi[k], gq);
                    }
                }
                opt.advance();
            }
        });
        record_epoch(result, epoch, training_rmse(model, triples), on_epoch);
    }
}

void train_feature_wise(FactorTrainResult& result, std::span<const Rating> triples, const TrainConfig& config,
                        const EpochCallback& on_epoch)
{
    FactorModel& model = result.model;
    const std::size_t f = model.factors();
    const double lambda = config.lambda;
    Optimizer opt(config.optimizer_config());
    const std::size_t tp = opt.add_tensor("P", model.num_users() * f);
    const std::size_t tq = opt.add_tensor("Q", model.num_items() * f);

    std::vector<double> residual(triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t)
        residual[t] = triples[t].value;

    std::size_t epoch = 0;
    for (std::size_t k = 0; k < f; ++k) {
        for (std::size_t pass = 0; pass < config.epochs; ++pass) {
            ++epoch;
            double sq = 0.0;
            detail::guard_epoch(epoch, [&] {
                for (std::size_t t = 0; t < triples.size(); ++t) {
                    const Rating& r = triples[t];
                    double& p = model.p(r.user, k);
                    double& q = model.q(r.item, k);
                    const double err = residual[t] - p * q;
                    if (!std::isfinite(err))
                        detail::diverged(epoch);
                    if (config.update_order == UpdateOrder::kSequential) {
                        p = opt.update(tp, r.user * f + k, p, -(q * err - lambda * p));
                        q = opt.update(tq, r.item * f + k, q, -(p * err - lambda * q));
                    } else {
                        const double gp = -(q * err - lambda * p);
                        const double gq = -(p * err - lambda * q);
                        p = opt.update(tp, r.user * f + k, p, gp);
                        q = opt.update(tq, r.item * f + k, q, gq);
                    }
                    opt.advance();
                }
            });
            for (std::size_t t = 0; t < triples.size(); ++t) {
                const double e = residual[t] - model.p(triples[t].user, k) * model.q(triples[t].item, k);
                sq += e * e;
            }
            const double rmse = triples.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(triples.size()));
            record_epoch(result, epoch, rmse, on_epoch);
        }
        for (std::size_t t = 0; t < triples.size(); ++t)
            residual[t] -= model.p(triples[t].user, k) * model.q(triples[t].item, k);
    }
}

} // namespace

FactorTrainResult funk_train_from(FactorModel model, std::span<const Rating> triples, const TrainConfig& config,
                                  const EpochCallback& on_epoch)
{
    config.validate();
    require(model.kind == FactorKind::kFunk, ErrorCode::kArgument, "funk_train: model is not a Funk model");
    require(model.factors() == config.factors, ErrorCode::kArgument, "funk_train: factor count mismatch");
    for (const Rating& r : triples)
        require(r.user < model.num_users() && r.item < model.num_items(), ErrorCode::kRange,
                "funk_train: rating outside model dimensions");

    FactorTrainResult result{std::move(model), {}};
    if (config.strategy == FunkStrategy::kFeatureWise) {
        train_feature_wise(result, triples, config, on_epoch);
    } else {
        train_all_factors(result, triples, config, on_epoch);
    }
    return result;
}

FactorTrainResult funk_train(const RatingDataset& ds, const TrainConfig& config, const EpochCallback& on_epoch)
{
    require(ds.kind() == FeedbackKind::kExplicit, ErrorCode::kArgument, "funk_train: expects explicit ratings");
    require(!ds.empty(), ErrorCode::kEmptyData, "funk_train: empty dataset");
    config.validate();
    return funk_train_from(init_funk_model(ds.num_users(), ds.num_items(), config.factors, config.seed), ds.ratings(),
                           config, on_epoch);
}

} // namespace recfact
