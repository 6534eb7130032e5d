#include "lookdrift/generator.hpp"

#include <cmath>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Array sigmoid(const Array& z) { return 1.0 / (1.0 + (-z).exp()); }

Matrix activate(Activation act, const Matrix& z) {
  const Array a = z.array();
  switch (act) {
    case Activation::silu:
      return (a * sigmoid(a)).matrix();
    case Activation::softplus:
      return (a.max(0.0) + (-a.abs()).exp().log1p()).matrix();
  }
  throw InvalidInput("unknown activation");
}

Array activation_derivative(Activation act, const Matrix& z) {
  const Array a = z.array();
  const Array s = sigmoid(a);
  switch (act) {
    case Activation::silu:
      return s * (1.0 + a * (1.0 - s));
    case Activation::softplus:
      return s;
  }
  throw InvalidInput("unknown activation");
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::silu:
      return "silu";
    case Activation::softplus:
      return "softplus";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "silu") return Activation::silu;
  if (name == "softplus") return Activation::softplus;
  throw InvalidInput("unknown activation '" + name + "' (expected silu or softplus)");
}

GeneratorParams::GeneratorParams(std::vector<int> layer_sizes, Activation act)
    : sizes_(std::move(layer_sizes)), act_(act) {
  if (sizes_.size() < 2) throw InvalidInput("generator needs at least input and output sizes");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw InvalidInput("layer sizes must be >= 1");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  offsets_.push_back(total);
  values_ = Eigen::VectorXd::Zero(total);
}

GeneratorParams GeneratorParams::initialize(std::vector<int> layer_sizes, Activation act,
                                            Rng& rng) {
  GeneratorParams p(std::move(layer_sizes), act);
  for (int l = 0; l < p.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.sizes_[l]));
    const Eigen::Index begin = p.offsets_[l];
    const Eigen::Index end = p.offsets_[l + 1];
    for (Eigen::Index i = begin; i < end; ++i) p.values_[i] = rng.uniform(-bound, bound);
  }
  return p;
}

GeneratorParams::WeightMap GeneratorParams::weight_of(Eigen::VectorXd& flat, int layer) const {
  return WeightMap(flat.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]);
}

GeneratorParams::BiasMap GeneratorParams::bias_of(Eigen::VectorXd& flat, int layer) const {
  return BiasMap(flat.data() + offsets_[layer] +
                     static_cast<Eigen::Index>(sizes_[layer]) * sizes_[layer + 1],
                 sizes_[layer + 1]);
}

GeneratorParams::ConstWeightMap GeneratorParams::weight_of(const Eigen::VectorXd& flat,
                                                          int layer) const {
  return ConstWeightMap(flat.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]);
}

GeneratorParams::ConstBiasMap GeneratorParams::bias_of(const Eigen::VectorXd& flat,
                                                      int layer) const {
  return ConstBiasMap(flat.data() + offsets_[layer] +
                          static_cast<Eigen::Index>(sizes_[layer]) * sizes_[layer + 1],
                      sizes_[layer + 1]);
}

GeneratorParams::WeightMap GeneratorParams::weight(int layer) { return weight_of(values_, layer); }

GeneratorParams::ConstWeightMap GeneratorParams::weight(int layer) const {
  return weight_of(values_, layer);
}

GeneratorParams::BiasMap GeneratorParams::bias(int layer) { return bias_of(values_, layer); }

GeneratorParams::ConstBiasMap GeneratorParams::bias(int layer) const {
  return bias_of(values_, layer);
}

bool GeneratorParams::same_shape(const GeneratorParams& other) const {
  return sizes_ == other.sizes_;
}

ForwardCache forward_cached(const GeneratorParams& params, const SampleBatch& noise) {
  if (noise.dim() != params.input_dim()) {
    throw InvalidInput("forward: noise has " + std::to_string(noise.dim()) +
                       " columns, generator expects " + std::to_string(params.input_dim()));
  }
  ForwardCache cache;
  const int layers = params.num_layers();
  cache.inputs.reserve(layers);
  cache.preactivations.reserve(layers);
  Matrix h = noise.matrix();
  for (int l = 0; l < layers; ++l) {
    Matrix z(h.rows(), params.layer_sizes()[l + 1]);
    z.noalias() = h * params.weight(l).transpose();
    z.rowwise() += params.bias(l);
    cache.inputs.push_back(std::move(h));
    if (l + 1 < layers) {
      h = activate(params.activation(), z);
      cache.preactivations.push_back(std::move(z));
    } else {
      cache.output = std::move(z);
    }
  }
  return cache;
}

SampleBatch forward(const GeneratorParams& params, const SampleBatch& noise) {
  return SampleBatch(forward_cached(params, noise).output);
}

LossAndGrad backward(const GeneratorParams& params, const ForwardCache& cache,
                     const SampleBatch& target) {
  if (target.size() != cache.output.rows() || target.dim() != cache.output.cols()) {
    throw InvalidInput("loss_and_grad: target shape does not match generator output");
  }
  const double batch = static_cast<double>(target.size());
  const Matrix residual = cache.output - target.matrix();

  LossAndGrad out;
  out.loss = residual.squaredNorm() / batch;
  out.grad = Eigen::VectorXd::Zero(params.values().size());

  Matrix dz = (2.0 / batch) * residual;
  for (int l = params.num_layers() - 1; l >= 0; --l) {
    params.weight_of(out.grad, l).noalias() = dz.transpose() * cache.inputs[l];
    params.bias_of(out.grad, l) = dz.colwise().sum();
    if (l > 0) {
      Matrix dh(dz.rows(), params.layer_sizes()[l]);
      dh.noalias() = dz * params.weight(l);
      dz = (dh.array() * activation_derivative(params.activation(), cache.preactivations[l - 1]))
               .matrix();
    }
  }
  return out;
}

LossAndGrad loss_and_grad(const GeneratorParams& params, const SampleBatch& noise,
                          const SampleBatch& target) {
  return backward(params, forward_cached(params, noise), target);
}

void AdamConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidInput("adam: lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidInput("adam: beta1 must be in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidInput("adam: beta2 must be in [0,1)");
  if (!(eps > 0.0)) throw InvalidInput("adam: eps must be > 0");
}

OptimizerState OptimizerState::for_params(const GeneratorParams& params, AdamConfig config) {
  config.validate();
  const auto n = params.values().size();
  return OptimizerState{config, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(GeneratorParams& params, const Eigen::VectorXd& grad, OptimizerState& state) {
  const auto n = params.values().size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw InvalidInput("adam_step: gradient/moment shape mismatch");
  }
  if (!grad.allFinite()) throw TrainingDiverged("adam_step: non-finite gradient");

  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step + 1);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  Eigen::VectorXd m = c.beta1 * state.m + (1.0 - c.beta1) * grad;
  Eigen::VectorXd v = c.beta2 * state.v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  Eigen::VectorXd p =
      params.values().array() - c.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
  if (!p.allFinite()) throw TrainingDiverged("adam_step: update produced non-finite parameters");
  state.m = std::move(m);
  state.v = std::move(v);
  state.step += 1;
  params.values() = std::move(p);
}

EmaParams::EmaParams(GeneratorParams initial, double decay)
    : shadow_(std::move(initial)), decay_(decay) {
  if (!(decay >= 0.0 && decay < 1.0)) {
    throw InvalidInput("EMA decay must be in [0, 1), got " + std::to_string(decay));
  }
}

void ema_update(EmaParams& ema, const GeneratorParams& params) {
  if (!ema.shadow().same_shape(params)) throw InvalidInput("ema_update: shape mismatch");
  const double d = ema.decay();
  ema.shadow().values() = d * ema.shadow().values() + (1.0 - d) * params.values();
}

}  // namespace lookdrift
