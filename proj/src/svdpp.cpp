#include <cmath>
#include <string>

#include "epoch_guard.hpp"
#include "recfact/error.hpp"
#include "recfact/factor_models.hpp"
#include "recfact/random.hpp"

namespace recfact {

namespace {

// z_u = |N(u)|^-1/2 sum_{j in N(u)} y_j, written into `z`.
void implicit_sum(const FactorModel& model, std::size_t u, std::vector<double>& z, double& scale)
{
    const std::size_t f = model.factors();
    z.assign(f, 0.0);
    const auto& set = model.implicit_sets[u];
    scale = 0.0;
    if (set.empty())
        return;
    for (std::size_t j : set)
        for (std::size_t k = 0; k < f; ++k)
            z[k] += (*model.y)(j, k);
    scale = 1.0 / std::sqrt(static_cast<double>(set.size()));
    for (double& x : z)
        x *= scale;
}

double biased_predict(const FactorModel& model, std::size_t u, std::size_t i, const std::vector<double>& z)
{
    const auto pu = model.p.row(u);
    const auto qi = model.q.row(i);
    double interaction = 0.0;
    for (std::size_t k = 0; k < qi.size(); ++k)
        interaction += qi[k] * (pu[k] + z[k]);
    return model.mu + model.user_bias[u] + model.item_bias[i] + interaction;
}

void require_svdpp(const FactorModel& model)
{
    require(model.kind == FactorKind::kSvdPlusPlus && model.y.has_value(), ErrorCode::kArgument,
            "model is not an SVD++ model");
}

} // namespace

FactorModel init_svdpp_model(const RatingDataset& ds, std::size_t factors, std::uint64_t seed, bool freeze_implicit)
{
    require(!ds.empty(), ErrorCode::kEmptyData, "svdpp: empty dataset");
    FactorModel model = init_funk_model(ds.num_users(), ds.num_items(), factors, seed);
    model.kind = FactorKind::kSvdPlusPlus;
    model.y = DenseMatrix(ds.num_items(), factors, 0.0);
    if (!freeze_implicit) {
        // Continue the same stream past P and Q.
        Rng rng(seed);
        for (std::size_t skip = 0; skip < model.p.data().size() + model.q.data().size(); ++skip)
            rng.next();
        const double root = std::sqrt(static_cast<double>(factors));
        for (double& x : model.y->data())
            x = rng.uniform() / root;
    }
    model.mu = ds.mean_rating();
    model.user_bias.assign(ds.num_users(), 0.0);
    model.item_bias.assign(ds.num_items(), 0.0);
    model.implicit_sets = ds.items_by_user();
    return model;
}

double svdpp_implicit_predict(const FactorModel& model, std::size_t u, std::size_t i)
{
    require_svdpp(model);
    require(u < model.num_users() && i < model.num_items(), ErrorCode::kRange, "svdpp: index out of range");
    std::vector<double> z;
    double scale = 0.0;
    implicit_sum(model, u, z, scale);
    return dot(model.q.row(i), z);
}

Prediction svdpp_predict(const FactorModel& model, std::optional<std::size_t> u, std::optional<std::size_t> i)
{
    require_svdpp(model);
    require(!u || *u < model.num_users(), ErrorCode::kRange, "svdpp: user index out of range");
    require(!i || *i < model.num_items(), ErrorCode::kRange, "svdpp: item index out of range");
    if (!u || !i) {
        double value = model.mu;
        if (u)
            value += model.user_bias[*u];
        if (i)
            value += model.item_bias[*i];
        return {value, kPredictionColdStart};
    }
    std::vector<double> z;
    double scale = 0.0;
    implicit_sum(model, *u, z, scale);
    return {biased_predict(model, *u, *i, z), kPredictionOk};
}

double svdpp_predict(const FactorModel& model, std::size_t u, std::size_t i)
{
    return svdpp_predict(model, std::optional<std::size_t>(u), std::optional<std::size_t>(i)).value;
}

double svdpp_loss(const FactorModel& model, std::span<const Rating> triples, double lambda)
{
    require_svdpp(model);
    double loss = 0.0;
    for (const Rating& r : triples) {
        const double e = r.value - svdpp_predict(model, r.user, r.item);
        const auto pu = model.p.row(r.user);
        const auto qi = model.q.row(r.item);
        double reg = model.user_bias[r.user] * model.user_bias[r.user] +
                     model.item_bias[r.item] * model.item_bias[r.item] + dot(pu, pu) + dot(qi, qi);
        for (std::size_t j : model.implicit_sets[r.user]) {
            const auto yj = model.y->row(j);
            reg += dot(yj, yj);
        }
        loss += e * e + lambda * reg;
    }
    return loss;
}

FactorGradient svdpp_loss_gradient(const FactorModel& model, std::span<const Rating> triples, double lambda)
{
    require_svdpp(model);
    const std::size_t f = model.factors();
    FactorGradient g{DenseMatrix(model.num_users(), f), DenseMatrix(model.num_items(), f),
                     std::vector<double>(model.num_users(), 0.0), std::vector<double>(model.num_items(), 0.0),
                     DenseMatrix(model.num_items(), f)};
    std::vector<double> z;
    double scale = 0.0;
    for (const Rating& r : triples) {
        const std::size_t u = r.user;
        const std::size_t i = r.item;
        implicit_sum(model, u, z, scale);
        const double e = r.value - biased_predict(model, u, i, z);
        g.user_bias[u] += -2.0 * e + 2.0 * lambda * model.user_bias[u];
        g.item_bias[i] += -2.0 * e + 2.0 * lambda * model.item_bias[i];
        for (std::size_t k = 0; k < f; ++k) {
            g.p(u, k) += -2.0 * e * model.q(i, k) + 2.0 * lambda * model.p(u, k);
            g.q(i, k) += -2.0 * e * (model.p(u, k) + z[k]) + 2.0 * lambda * model.q(i, k);
        }
        for (std::size_t j : model.implicit_sets[u])
            for (std::size_t k = 0; k < f; ++k)
                (*g.y)(j, k) += -2.0 * e * scale * model.q(i, k) + 2.0 * lambda * (*model.y)(j, k);
    }
    return g;
}

FactorTrainResult svdpp_train_from(FactorModel model, std::span<const Rating> triples, const TrainConfig& config,
                                   const EpochCallback& on_epoch)
{
    config.validate();
    require_svdpp(model);
    model.validate();
    require(model.factors() == config.factors, ErrorCode::kArgument, "svdpp_train: factor count mismatch");
    for (const Rating& r : triples)
        require(r.user < model.num_users() && r.item < model.num_items(), ErrorCode::kRange,
                "svdpp_train: rating outside model dimensions");

    const std::size_t f = model.factors();
    const double lambda = config.lambda;
    Optimizer opt(config.optimizer_config());
    const std::size_t tbu = opt.add_tensor("b_u", model.num_users());
    const std::size_t tbi = opt.add_tensor("b_i", model.num_items());
    const std::size_t tp = opt.add_tensor("P", model.num_users() * f);
    const std::size_t tq = opt.add_tensor("Q", model.num_items() * f);
    const std::size_t ty = opt.add_tensor("Y", model.num_items() * f);

    FactorTrainResult result{std::move(model), {}};
    FactorModel& m = result.model;
    std::vector<double> z;
    std::vector<double> gq(f);
    double scale = 0.0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::guard_epoch(epoch, [&] {
            for (const Rating& r : triples) {
                const std::size_t u = r.user;
                const std::size_t i = r.item;
                implicit_sum(m, u, z, scale);
                const double e = r.value - biased_predict(m, u, i, z);
                if (!std::isfinite(e))
                    detail::diverged(epoch);

                // Every gradient below is evaluated at the pre-update parameters.
                auto pu = m.p.row(u);
                auto qi = m.q.row(i);
                for (std::size_t k = 0; k < f; ++k)
                    gq[k] = -e * (pu[k] + z[k]) + lambda * qi[k];
                if (!config.freeze_implicit) {
                    for (std::size_t j : m.implicit_sets[u])
                        for (std::size_t k = 0; k < f; ++k) {
                            double& yjk = (*m.y)(j, k);
                            yjk = opt.update(ty, j * f + k, yjk, -e * scale * qi[k] + lambda * yjk);
                        }
                }
                m.user_bias[u] = opt.update(tbu, u, m.user_bias[u], -e + lambda * m.user_bias[u]);
                m.item_bias[i] = opt.update(tbi, i, m.item_bias[i], -e + lambda * m.item_bias[i]);
                for (std::size_t k = 0; k < f; ++k) {
                    pu[k] = opt.update(tp, u * f + k, pu[k], -e * qi[k] + lambda * pu[k]);
                    qi[k] = opt.update(tq, i * f + k, qi[k], gq[k]);
                }
                opt.advance();
            }
        });
        const double rmse = training_rmse(m, triples);
        if (!std::isfinite(rmse))
            detail::diverged(epoch);
        result.rmse_trace.push_back(rmse);
        if (on_epoch)
            on_epoch(epoch, rmse);
    }
    return result;
}

FactorTrainResult svdpp_train(const RatingDataset& ds, const TrainConfig& config, const EpochCallback& on_epoch)
{
    require(ds.kind() == FeedbackKind::kExplicit, ErrorCode::kArgument, "svdpp_train: expects explicit ratings");
    config.validate();
    return svdpp_train_from(init_svdpp_model(ds, config.factors, config.seed, config.freeze_implicit), ds.ratings(),
                            config, on_epoch);
}

} // namespace recfact
