#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recfact {

// Four-step update shared by every trainer:
//   g_t  = gradient
//   m_t  = phi(g_1..g_t),  V_t = psi(g_1..g_t)
//   eta  = alpha * m_t / (sqrt(V_t) + eps)
//   theta <- theta - eta
//
// kSgd and kMomentum bypass the denominator (eta = alpha * m_t) so that plain
// SGD is exactly theta - alpha * g. No bias correction is applied to m or V.
enum class OptimizerKind { kSgd, kMomentum, kAdaptive };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::kSgd;
    double alpha = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

OptimizerKind parse_optimizer_kind(std::string_view name);
const char* to_string(OptimizerKind kind) noexcept;

class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config = {});

    // Registers a parameter tensor; returns its handle.
    std::size_t add_tensor(std::string name, std::size_t size);

    // Applies the update to one coordinate and returns the new parameter.
    double update(std::size_t tensor, std::size_t index, double param, double grad);

    // Whole-tensor update; advances the step counter.
    void step(std::size_t tensor, std::span<double> params, std::span<const double> grads);

    // Step counter for trainers driving coordinate updates themselves.
    void advance() noexcept { ++t_; }

    void reset();

    const OptimizerConfig& config() const noexcept { return config_; }
    std::size_t steps() const noexcept { return t_; }
    std::size_t num_tensors() const noexcept { return tensors_.size(); }
    std::span<const double> first_moment(std::size_t tensor) const { return tensors_.at(tensor).m; }
    std::span<const double> second_moment(std::size_t tensor) const { return tensors_.at(tensor).v; }
    const std::string& tensor_name(std::size_t tensor) const { return tensors_.at(tensor).name; }

private:
    struct Tensor {
        std::string name;
        std::vector<double> m;
        std::vector<double> v;
    };

    OptimizerConfig config_;
    std::vector<Tensor> tensors_;
    std::size_t t_ = 0;
};

} // namespace recfact
