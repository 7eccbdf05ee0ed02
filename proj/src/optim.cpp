#include "recfact/optim.hpp"

#include <algorithm>
#include <cmath>

#include "recfact/error.hpp"

namespace recfact {

OptimizerKind parse_optimizer_kind(std::string_view name)
{
    if (name == "sgd")
        return OptimizerKind::kSgd;
    if (name == "momentum")
        return OptimizerKind::kMomentum;
    if (name == "adaptive" || name == "adam")
        return OptimizerKind::kAdaptive;
    fail(ErrorCode::kArgument, "unknown optimizer '" + std::string(name) + "' (expected sgd, momentum or adaptive)");
}

const char* to_string(OptimizerKind kind) noexcept
{
    switch (kind) {
    case OptimizerKind::kSgd:
        return "sgd";
    case OptimizerKind::kMomentum:
        return "momentum";
    case OptimizerKind::kAdaptive:
        return "adaptive";
    }
    return "?";
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config)
{
    require(std::isfinite(config_.alpha) && config_.alpha > 0.0, ErrorCode::kArgument, "optimizer: alpha must be > 0");
    require(config_.beta1 >= 0.0 && config_.beta1 < 1.0, ErrorCode::kArgument, "optimizer: beta1 must be in [0, 1)");
    require(config_.beta2 >= 0.0 && config_.beta2 < 1.0, ErrorCode::kArgument, "optimizer: beta2 must be in [0, 1)");
    require(config_.epsilon > 0.0, ErrorCode::kArgument, "optimizer: epsilon must be > 0");
}

std::size_t Optimizer::add_tensor(std::string name, std::size_t size)
{
    tensors_.push_back(Tensor{std::move(name), std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)});
    return tensors_.size() - 1;
}

double Optimizer::update(std::size_t tensor, std::size_t index, double param, double grad)
{
    Tensor& t = tensors_.at(tensor);
    if (!std::isfinite(grad))
        fail(ErrorCode::kGradient, "non-finite gradient in tensor '" + t.name + "' at index " + std::to_string(index));
    double& m = t.m.at(index);
    switch (config_.kind) {
    case OptimizerKind::kSgd:
        m = grad;
        return param - config_.alpha * grad;
    case OptimizerKind::kMomentum:
        m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
        return param - config_.alpha * m;
    case OptimizerKind::kAdaptive: {
        double& v = t.v[index];
        m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
        v = config_.beta2 * v + (1.0 - config_.beta2) * grad * grad;
        return param - config_.alpha * m / (std::sqrt(v) + config_.epsilon);
    }
    }
    return param;
}

void Optimizer::step(std::size_t tensor, std::span<double> params, std::span<const double> grads)
{
    require(params.size() == grads.size() && params.size() == tensors_.at(tensor).m.size(), ErrorCode::kShape,
            "optimizer: tensor '" + tensors_.at(tensor).name + "' shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i] = update(tensor, i, params[i], grads[i]);
    ++t_;
}

void Optimizer::reset()
{
    for (Tensor& t : tensors_) {
        std::fill(t.m.begin(), t.m.end(), 0.0);
        std::fill(t.v.begin(), t.v.end(), 0.0);
    }
    t_ = 0;
}

} // namespace recfact
