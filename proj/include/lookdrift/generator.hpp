#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lookdrift/rng.hpp"
#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

enum class Activation { silu, softplus };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Fully-connected network noise_dim -> hidden... -> data_dim. Hidden layers
/// use `activation`, the output layer is linear.
///
/// All weights and biases live in one flat vector. Layer l stores its
/// (out x in, row-major) weight followed by its bias.
class GeneratorParams {
 public:
  using WeightMap = Eigen::Map<Matrix>;
  using ConstWeightMap = Eigen::Map<const Matrix>;
  using BiasMap = Eigen::Map<RowVector>;
  using ConstBiasMap = Eigen::Map<const RowVector>;

  GeneratorParams(std::vector<int> layer_sizes, Activation act);

  /// Fan-in scaled uniform init: every weight and bias of layer l is drawn
  /// from U(-1/sqrt(in_l), 1/sqrt(in_l)), layer by layer, weights first.
  static GeneratorParams initialize(std::vector<int> layer_sizes, Activation act, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }

  WeightMap weight(int layer);
  ConstWeightMap weight(int layer) const;
  BiasMap bias(int layer);
  ConstBiasMap bias(int layer) const;

  /// Views of layer `layer` inside any flat buffer laid out like values(),
  /// e.g. a gradient vector.
  WeightMap weight_of(Eigen::VectorXd& flat, int layer) const;
  BiasMap bias_of(Eigen::VectorXd& flat, int layer) const;
  ConstWeightMap weight_of(const Eigen::VectorXd& flat, int layer) const;
  ConstBiasMap bias_of(const Eigen::VectorXd& flat, int layer) const;

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }

  bool same_shape(const GeneratorParams& other) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Activation act_;
  Eigen::VectorXd values_;
};

/// Activations kept from a forward pass for the backward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;       ///< input to each layer
  std::vector<Matrix> preactivations;
  Matrix output;
};

ForwardCache forward_cached(const GeneratorParams& params, const SampleBatch& noise);

SampleBatch forward(const GeneratorParams& params, const SampleBatch& noise);

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;  ///< same layout as GeneratorParams::values()
};

/// loss = mean over rows of |f(noise) - target|^2 with the target held
/// constant; gradients by reverse-mode through the network only.
LossAndGrad backward(const GeneratorParams& params, const ForwardCache& cache,
                     const SampleBatch& target);

LossAndGrad loss_and_grad(const GeneratorParams& params, const SampleBatch& noise,
                          const SampleBatch& target);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct OptimizerState {
  AdamConfig config;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t step = 0;

  static OptimizerState for_params(const GeneratorParams& params, AdamConfig config);
};

/// Bias-corrected Adam. Throws TrainingDiverged on a non-finite gradient or
/// update; nothing is modified in that case.
void adam_step(GeneratorParams& params, const Eigen::VectorXd& grad, OptimizerState& state);

class EmaParams {
 public:
  /// Throws InvalidInput unless decay is in [0, 1).
  EmaParams(GeneratorParams initial, double decay);

  const GeneratorParams& shadow() const { return shadow_; }
  GeneratorParams& shadow() { return shadow_; }
  double decay() const { return decay_; }

 private:
  GeneratorParams shadow_;
  double decay_;
};

/// shadow <- decay * shadow + (1 - decay) * params
void ema_update(EmaParams& ema, const GeneratorParams& params);

}  // namespace lookdrift
