#include "epoch_guard.hpp"
#include "recfact/fm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recfact/error.hpp"
#include "recfact/random.hpp"

namespace recfact {

FeatureVector::FeatureVector(std::size_t dimension, std::vector<FeatureEntry> entries)
    : dimension_(dimension), entries_(std::move(entries))
{
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        if (entries_[e].index >= dimension_)
            fail(ErrorCode::kRange,
                 "feature index " + std::to_string(entries_[e].index) + " >= dimension " + std::to_string(dimension_));
        require(e == 0 || entries_[e - 1].index < entries_[e].index, ErrorCode::kInput,
                "feature indices must be strictly increasing");
        require(std::isfinite(entries_[e].value), ErrorCode::kInput, "feature value is not finite");
    }
}

FeatureVector FeatureVector::from_dense(std::span<const double> values, std::span<const std::size_t> fields)
{
    require(fields.empty() || fields.size() == values.size(), ErrorCode::kShape, "field list length mismatch");
    std::vector<FeatureEntry> entries;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0)
            entries.push_back({i, values[i], fields.empty() ? kNoField : fields[i]});
    return FeatureVector(values.size(), std::move(entries));
}

void FmModel::validate() const
{
    require(v.rows() == w.size(), ErrorCode::kShape, "fm: V rows must equal the feature dimension");
    require(std::isfinite(w0), ErrorCode::kInput, "fm: w0 is not finite");
    for (double x : w)
        require(std::isfinite(x), ErrorCode::kInput, "fm: non-finite linear weight");
    for (double x : v.data())
        require(std::isfinite(x), ErrorCode::kInput, "fm: non-finite latent entry");
}

FmModel init_fm_model(std::size_t dimension, std::size_t factors, std::uint64_t seed)
{
    require(dimension >= 1 && factors >= 1, ErrorCode::kArgument, "fm: dimension and factors must be >= 1");
    Rng rng(seed);
    FmModel model{0.0, std::vector<double>(dimension, 0.0), DenseMatrix(dimension, factors)};
    const double hi = 1.0 / std::sqrt(static_cast<double>(factors));
    for (double& x : model.v.data())
        x = rng.uniform() * hi;
    return model;
}

namespace {

void check_dimension(std::size_t model_dim, const FeatureVector& x)
{
    if (model_dim != x.dimension())
        fail(ErrorCode::kShape, "feature dimension " + std::to_string(x.dimension()) + " != model dimension " +
                                    std::to_string(model_dim));
}

} // namespace

double fm_predict_naive(const FmModel& model, const FeatureVector& x)
{
    check_dimension(model.dimension(), x);
    const auto e = x.entries();
    double y = model.w0;
    for (const auto& a : e)
        y += model.w[a.index] * a.value;
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b)
            y += dot(model.v.row(e[a].index), model.v.row(e[b].index)) * e[a].value * e[b].value;
    return y;
}

double fm_predict_fast(const FmModel& model, const FeatureVector& x)
{
    check_dimension(model.dimension(), x);
    const std::size_t k = model.factors();
    double linear = model.w0;
    double pairs = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& a : x.entries()) {
            const double t = model.v(a.index, f) * a.value;
            sum += t;
            sum_sq += t * t;
        }
        pairs += sum * sum - sum_sq;
    }
    for (const auto& a : x.entries())
        linear += model.w[a.index] * a.value;
    return linear + 0.5 * pairs;
}

FmGradient fm_gradient(const FmModel& model, const FeatureVector& x)
{
    check_dimension(model.dimension(), x);
    const std::size_t k = model.factors();
    std::vector<double> sums(k, 0.0);
    for (const auto& a : x.entries())
        for (std::size_t f = 0; f < k; ++f)
            sums[f] += model.v(a.index, f) * a.value;

    FmGradient g;
    g.indices.reserve(x.nonzeros());
    g.w.reserve(x.nonzeros());
    g.v.reserve(x.nonzeros() * k);
    for (const auto& a : x.entries()) {
        g.indices.push_back(a.index);
        g.w.push_back(a.value);
        for (std::size_t f = 0; f < k; ++f) {
            const double vif = model.v(a.index, f);
            g.v.push_back(a.value * sums[f] - vif * a.value * a.value);
        }
    }
    return g;
}

FmLoss parse_fm_loss(std::string_view name)
{
    if (name == "squared")
        return FmLoss::kSquared;
    if (name == "logistic")
        return FmLoss::kLogistic;
    fail(ErrorCode::kArgument, "unknown loss '" + std::string(name) + "' (expected squared or logistic)");
}

const char* to_string(FmLoss loss) noexcept { return loss == FmLoss::kSquared ? "squared" : "logistic"; }

double fm_sample_loss(double prediction, double target, FmLoss loss)
{
    if (loss == FmLoss::kSquared) {
        const double e = prediction - target;
        return e * e;
    }
    // -y log s(z) - (1-y) log(1 - s(z)), written to avoid overflow
    const double z = target == 1.0 ? prediction : -prediction;
    return std::log1p(std::exp(-std::abs(z))) + std::max(-z, 0.0);
}

namespace {

// d loss / d y_hat for the per-sample objective (1/2 (y_hat - y)^2 or log-loss).
double loss_slope(double prediction, double target, FmLoss loss)
{
    if (loss == FmLoss::kSquared)
        return prediction - target;
    return 1.0 / (1.0 + std::exp(-prediction)) - target;
}

void check_samples(std::span<const FmSample> samples, std::size_t dimension, FmLoss loss)
{
    for (const FmSample& s : samples) {
        check_dimension(dimension, s.x);
        require(std::isfinite(s.target), ErrorCode::kInput, "fm: non-finite target");
        if (loss == FmLoss::kLogistic)
            require(s.target == 0.0 || s.target == 1.0, ErrorCode::kArgument, "fm: logistic loss needs 0/1 targets");
    }
}

} // namespace

FmTrainResult fm_train_from(FmModel model, std::span<const FmSample> samples, const FmTrainConfig& config,
                            const FmEpochCallback& on_epoch)
{
    model.validate();
    require(config.lambda >= 0.0, ErrorCode::kArgument, "fm: lambda must be >= 0");
    check_samples(samples, model.dimension(), config.loss);

    const std::size_t k = model.factors();
    Optimizer opt(config.optimizer);
    const std::size_t t0 = opt.add_tensor("w0", 1);
    const std::size_t tw = opt.add_tensor("w", model.dimension());
    const std::size_t tv = opt.add_tensor("V", model.dimension() * k);

    FmTrainResult result{std::move(model), {}};
    FmModel& m = result.model;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::guard_epoch(epoch, [&] {
            for (const FmSample& s : samples) {
                const double y = fm_predict_fast(m, s.x);
                if (!std::isfinite(y))
                    detail::diverged(epoch);
                const double slope = loss_slope(y, s.target, config.loss);
                const FmGradient g = fm_gradient(m, s.x);
                m.w0 = opt.update(t0, 0, m.w0, slope * g.w0);
                for (std::size_t a = 0; a < g.indices.size(); ++a) {
                    const std::size_t i = g.indices[a];
                    m.w[i] = opt.update(tw, i, m.w[i], slope * g.w[a] + config.lambda * m.w[i]);
                    for (std::size_t f = 0; f < k; ++f) {
                        double& vif = m.v(i, f);
                        vif = opt.update(tv, i * k + f, vif, slope * g.v[a * k + f] + config.lambda * vif);
                    }
                }
                opt.advance();
            }
        });
        double total = 0.0;
        for (const FmSample& s : samples)
            total += fm_sample_loss(fm_predict_fast(m, s.x), s.target, config.loss);
        const double mean = samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
        if (!std::isfinite(mean))
            detail::diverged(epoch);
        result.loss_trace.push_back(mean);
        if (on_epoch)
            on_epoch(epoch, mean);
    }
    return result;
}

FmTrainResult fm_train(std::span<const FmSample> samples, const FmTrainConfig& config, const FmEpochCallback& on_epoch)
{
    require(!samples.empty(), ErrorCode::kEmptyData, "fm: no training samples");
    return fm_train_from(init_fm_model(samples.front().x.dimension(), config.factors, config.seed), samples, config,
                         on_epoch);
}

} // namespace recfact
