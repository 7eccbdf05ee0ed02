#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recfact/linalg.hpp"
#include "recfact/optim.hpp"

namespace recfact {

inline constexpr std::size_t kNoField = std::numeric_limits<std::size_t>::max();

struct FeatureEntry {
    std::size_t index = 0;
    double value = 0.0;
    std::size_t field = kNoField;

    bool operator==(const FeatureEntry&) const = default;
};

// Sparse input row: entries sorted by strictly increasing index, all < dimension.
class FeatureVector {
public:
    FeatureVector(std::size_t dimension, std::vector<FeatureEntry> entries);

    // Drops zeros. `fields`, when given, assigns a field per dense position.
    static FeatureVector from_dense(std::span<const double> values, std::span<const std::size_t> fields = {});

    std::size_t dimension() const noexcept { return dimension_; }
    std::span<const FeatureEntry> entries() const noexcept { return entries_; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }

private:
    std::size_t dimension_;
    std::vector<FeatureEntry> entries_;
};

// ------------------------------------------------------------------ FM

// y(x) = w0 + sum_i w_i x_i + sum_{i<j} <v_i, v_j> x_i x_j
struct FmModel {
    double w0 = 0.0;
    std::vector<double> w;
    DenseMatrix v; // n x k

    std::size_t dimension() const noexcept { return w.size(); }
    std::size_t factors() const noexcept { return v.cols(); }
    void validate() const;
};

// w0 = w = 0; V entries uniform(0, 1/sqrt(k)), row-major.
FmModel init_fm_model(std::size_t dimension, std::size_t factors, std::uint64_t seed);

// Explicit double loop over nonzero pairs.
double fm_predict_naive(const FmModel& model, const FeatureVector& x);

// O(k * nnz) via 1/2 sum_f ((sum_i v_if x_i)^2 - sum_i v_if^2 x_i^2).
double fm_predict_fast(const FmModel& model, const FeatureVector& x);

// d y / d theta, sparse over the nonzeros of x.
struct FmGradient {
    double w0 = 1.0;
    std::vector<std::size_t> indices; // active feature ids
    std::vector<double> w;            // x_i per active feature
    std::vector<double> v;            // indices.size() x k, row-major
};

FmGradient fm_gradient(const FmModel& model, const FeatureVector& x);

enum class FmLoss { kSquared, kLogistic };

FmLoss parse_fm_loss(std::string_view name);
const char* to_string(FmLoss loss) noexcept;

struct FmSample {
    FeatureVector x;
    double target = 0.0;
};

struct FmTrainConfig {
    std::size_t factors = 8;
    double lambda = 0.0;
    std::size_t epochs = 10; // 0 returns the initial model
    std::uint64_t seed = 42;
    FmLoss loss = FmLoss::kSquared;
    OptimizerConfig optimizer;
};

// Per-epoch trace: mean squared error (squared loss) or mean log-loss (logistic).
using FmEpochCallback = std::function<void(std::size_t epoch, double loss)>;

struct FmTrainResult {
    FmModel model;
    std::vector<double> loss_trace;
};

double fm_sample_loss(double prediction, double target, FmLoss loss);

FmTrainResult fm_train(std::span<const FmSample> samples, const FmTrainConfig& config,
                       const FmEpochCallback& on_epoch = {});
FmTrainResult fm_train_from(FmModel model, std::span<const FmSample> samples, const FmTrainConfig& config,
                            const FmEpochCallback& on_epoch = {});

// ----------------------------------------------------------------- FFM

// Pair term sum_{a<b} <v_{j_a, f_b}, v_{j_b, f_a}> x_a x_b, one latent vector
// per (feature, field) pair.
struct FfmModel {
    double w0 = 0.0;
    std::vector<double> w;
    std::size_t fields = 1;
    std::size_t factors = 1;
    std::vector<double> latent; // n x fields x factors

    std::size_t dimension() const noexcept { return w.size(); }
    std::span<double> vec(std::size_t feature, std::size_t field)
    {
        return {latent.data() + (feature * fields + field) * factors, factors};
    }
    std::span<const double> vec(std::size_t feature, std::size_t field) const
    {
        return {latent.data() + (feature * fields + field) * factors, factors};
    }
    void validate() const;
};

FfmModel init_ffm_model(std::size_t dimension, std::size_t fields, std::size_t factors, std::uint64_t seed);

// O(nnz^2 k). Every active entry must carry a field id < model.fields.
double ffm_predict(const FfmModel& model, const FeatureVector& x);

struct FfmLatentGradient {
    std::size_t feature = 0;
    std::size_t field = 0;
    std::vector<double> grad;
};

struct FfmGradient {
    double w0 = 1.0;
    std::vector<std::size_t> indices;
    std::vector<double> w;
    std::vector<FfmLatentGradient> latent; // one block per touched (feature, field)
};

FfmGradient ffm_gradient(const FfmModel& model, const FeatureVector& x);

struct FfmTrainConfig {
    std::size_t fields = 1;
    std::size_t factors = 4;
    double lambda = 0.0;
    std::size_t epochs = 10;
    std::uint64_t seed = 42;
    FmLoss loss = FmLoss::kSquared;
    OptimizerConfig optimizer;
};

struct FfmTrainResult {
    FfmModel model;
    std::vector<double> loss_trace;
};

FfmTrainResult ffm_train(std::span<const FmSample> samples, std::size_t dimension, const FfmTrainConfig& config,
                         const FmEpochCallback& on_epoch = {});
FfmTrainResult ffm_train_from(FfmModel model, std::span<const FmSample> samples, const FfmTrainConfig& config,
                              const FmEpochCallback& on_epoch = {});

// ------------------------------------------------------------- encoder

enum class ColumnKind { kCategorical, kNumeric };

struct EncoderColumn {
    std::string name;
    ColumnKind kind = ColumnKind::kCategorical;
    std::vector<std::string> categories; // categorical only
};

// Column c becomes field c. A categorical column takes categories.size() + 1
// consecutive indices, the last one reserved for unseen values; a numeric
// column takes one index carrying its value.
class FeatureEncoder {
public:
    explicit FeatureEncoder(std::vector<EncoderColumn> columns);

    const std::vector<EncoderColumn>& columns() const noexcept { return columns_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t num_fields() const noexcept { return columns_.size(); }
    std::size_t offset(std::size_t column) const { return offsets_.at(column); }
    std::size_t unknown_index(std::size_t column) const;

    FeatureVector encode(std::span<const std::string> record) const;
    // Categorical-only fast path: one category position per column (npos = unknown).
    FeatureVector encode_positions(std::span<const std::size_t> positions) const;

private:
    std::vector<EncoderColumn> columns_;
    std::vector<std::size_t> offsets_;
    std::vector<std::unordered_map<std::string, std::size_t>> lookup_;
    std::size_t dimension_ = 0;
};

} // namespace recfact
