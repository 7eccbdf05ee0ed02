#include <cmath>
#include <map>
#include <string>

#include "epoch_guard.hpp"
#include "recfact/error.hpp"
#include "recfact/fm.hpp"
#include "recfact/random.hpp"

namespace recfact {

void FfmModel::validate() const
{
    require(fields >= 1 && factors >= 1, ErrorCode::kArgument, "ffm: fields and factors must be >= 1");
    require(latent.size() == w.size() * fields * factors, ErrorCode::kShape, "ffm: latent tensor size");
    require(std::isfinite(w0), ErrorCode::kInput, "ffm: w0 is not finite");
    for (double x : w)
        require(std::isfinite(x), ErrorCode::kInput, "ffm: non-finite linear weight");
    for (double x : latent)
        require(std::isfinite(x), ErrorCode::kInput, "ffm: non-finite latent entry");
}

FfmModel init_ffm_model(std::size_t dimension, std::size_t fields, std::size_t factors, std::uint64_t seed)
{
    require(dimension >= 1 && fields >= 1 && factors >= 1, ErrorCode::kArgument,
            "ffm: dimension, fields and factors must be >= 1");
    Rng rng(seed);
    FfmModel model{0.0, std::vector<double>(dimension, 0.0), fields, factors,
                   std::vector<double>(dimension * fields * factors)};
    const double hi = 1.0 / std::sqrt(static_cast<double>(factors));
    for (double& x : model.latent)
        x = rng.uniform() * hi;
    return model;
}

namespace {

void check_fields(const FfmModel& model, const FeatureVector& x)
{
    if (model.dimension() != x.dimension())
        fail(ErrorCode::kShape, "feature dimension " + std::to_string(x.dimension()) + " != model dimension " +
                                    std::to_string(model.dimension()));
    for (const auto& e : x.entries()) {
        if (e.field == kNoField)
            fail(ErrorCode::kEncoding, "ffm: feature " + std::to_string(e.index) + " has no field id");
        if (e.field >= model.fields)
            fail(ErrorCode::kEncoding, "ffm: feature " + std::to_string(e.index) + " has field " +
                                           std::to_string(e.field) + " >= field count " +
                                           std::to_string(model.fields));
    }
}

} // namespace

double ffm_predict(const FfmModel& model, const FeatureVector& x)
{
    check_fields(model, x);
    const auto e = x.entries();
    double y = model.w0;
    for (const auto& a : e)
        y += model.w[a.index] * a.value;
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b)
            y += dot(model.vec(e[a].index, e[b].field), model.vec(e[b].index, e[a].field)) * e[a].value * e[b].value;
    return y;
}

FfmGradient ffm_gradient(const FfmModel& model, const FeatureVector& x)
{
    check_fields(model, x);
    const auto e = x.entries();
    const std::size_t k = model.factors;
    FfmGradient g;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
    auto block = [&](std::size_t feature, std::size_t field) -> std::vector<double>& {
        auto [it, inserted] = slot.try_emplace({feature, field}, g.latent.size());
        if (inserted)
            g.latent.push_back({feature, field, std::vector<double>(k, 0.0)});
        return g.latent[it->second].grad;
    };
    for (const auto& a : e) {
        g.indices.push_back(a.index);
        g.w.push_back(a.value);
    }
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b) {
            const double c = e[a].value * e[b].value;
            const auto va = model.vec(e[a].index, e[b].field);
            const auto vb = model.vec(e[b].index, e[a].field);
            auto& ga = block(e[a].index, e[b].field);
            for (std::size_t f = 0; f < k; ++f)
                ga[f] += c * vb[f];
            auto& gb = block(e[b].index, e[a].field);
            for (std::size_t f = 0; f < k; ++f)
                gb[f] += c * va[f];
        }
    return g;
}

FfmTrainResult ffm_train_from(FfmModel model, std::span<const FmSample> samples, const FfmTrainConfig& config,
                              const FmEpochCallback& on_epoch)
{
    model.validate();
    require(config.lambda >= 0.0, ErrorCode::kArgument, "ffm: lambda must be >= 0");
    for (const FmSample& s : samples) {
        check_fields(model, s.x);
        if (config.loss == FmLoss::kLogistic)
            require(s.target == 0.0 || s.target == 1.0, ErrorCode::kArgument, "ffm: logistic loss needs 0/1 targets");
    }

    const std::size_t k = model.factors;
    Optimizer opt(config.optimizer);
    const std::size_t t0 = opt.add_tensor("w0", 1);
    const std::size_t tw = opt.add_tensor("w", model.dimension());
    const std::size_t tv = opt.add_tensor("V", model.latent.size());

    FfmTrainResult result{std::move(model), {}};
    FfmModel& m = result.model;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::guard_epoch(epoch, [&] {
            for (const FmSample& s : samples) {
                const double y = ffm_predict(m, s.x);
                if (!std::isfinite(y))
                    detail::diverged(epoch);
                const double slope = config.loss == FmLoss::kSquared ? y - s.target
                                                                     : 1.0 / (1.0 + std::exp(-y)) - s.target;
                const FfmGradient g = ffm_gradient(m, s.x);
                m.w0 = opt.update(t0, 0, m.w0, slope * g.w0);
                for (std::size_t a = 0; a < g.indices.size(); ++a) {
                    const std::size_t i = g.indices[a];
                    m.w[i] = opt.update(tw, i, m.w[i], slope * g.w[a] + config.lambda * m.w[i]);
                }
                for (const auto& blk : g.latent) {
                    auto v = m.vec(blk.feature, blk.field);
                    const std::size_t base = (blk.feature * m.fields + blk.field) * k;
                    for (std::size_t f = 0; f < k; ++f)
                        v[f] = opt.update(tv, base + f, v[f], slope * blk.grad[f] + config.lambda * v[f]);
                }
                opt.advance();
            }
        });
        double total = 0.0;
        for (const FmSample& s : samples)
            total += fm_sample_loss(ffm_predict(m, s.x), s.target, config.loss);
        const double mean = samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
        if (!std::isfinite(mean))
            detail::diverged(epoch);
        result.loss_trace.push_back(mean);
        if (on_epoch)
            on_epoch(epoch, mean);
    }
    return result;
}

FfmTrainResult ffm_train(std::span<const FmSample> samples, std::size_t dimension, const FfmTrainConfig& config,
                         const FmEpochCallback& on_epoch)
{
    require(!samples.empty(), ErrorCode::kEmptyData, "ffm: no training samples");
    return ffm_train_from(init_ffm_model(dimension, config.fields, config.factors, config.seed), samples, config,
                          on_epoch);
}

} // namespace recfact
