#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/oracle.hpp"

namespace landscape {

enum class Activation { kTanh, kRelu };
enum class LossKind { kMse, kCrossEntropy };

// Dense feed-forward network. layer_widths[0] is the input width and the last
// entry the output width; hidden layers use `activation`, the output is linear
// (softmax folded into the cross-entropy loss).
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::kTanh;
  LossKind loss = LossKind::kCrossEntropy;

  std::size_t param_count() const;
  void validate() const;
};

// m samples of p features, row-major. For cross-entropy the targets hold class
// labels 0..C-1 stored as reals.
struct ToyDataset {
  std::size_t count = 0;
  std::size_t features = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::span<const double> row(std::size_t i) const { return {inputs.data() + i * features, features}; }
  void validate() const;
};

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 0.1;
  std::size_t batch = 32;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
};

// Full-dataset mean loss of an MLP as a function of its flat parameters.
// Layout per layer: weights (out x in, row-major) followed by biases (out).
class MlpOracle final : public LossOracle {
 public:
  MlpOracle(MlpSpec spec, ToyDataset data, ParamVector origin = {});

  std::size_t dim() const override { return dim_; }
  std::string id() const override;
  double value(std::span<const double> theta) const override;
  ParamVector gradient(std::span<const double> theta) const override;
  ParamVector default_origin() const override;

  // Mean loss and its gradient over the listed sample indices.
  double loss_and_gradient(std::span<const double> theta, std::span<const std::size_t> samples,
                           ParamVector* grad) const;
  std::vector<double> predict(std::span<const double> theta, std::span<const double> input) const;

  const MlpSpec& spec() const { return spec_; }
  const ToyDataset& data() const { return data_; }

 private:
  MlpSpec spec_;
  ToyDataset data_;
  ParamVector origin_;
  std::size_t dim_;
};

ParamVector init_mlp_params(const MlpSpec& spec, std::uint64_t seed);

// Minibatch SGD with L2 weight decay. Deterministic for a fixed seed; throws
// NumericError naming the epoch if the loss becomes non-finite.
ParamVector train_mlp(const MlpSpec& spec, const ToyDataset& data, const TrainConfig& cfg);

// Fraction of samples whose arg-max output matches the label (cross-entropy only).
double classification_accuracy(const MlpOracle& oracle, std::span<const double> theta);

// Two Gaussian blobs in the plane at (+-separation/2, 0) with unit-scaled
// `noise`; a `label_noise` fraction of labels is flipped.
ToyDataset make_two_class_dataset(std::size_t count, std::uint64_t seed, double separation, double noise,
                                  double label_noise = 0.0);

void to_json(nlohmann::json& j, const MlpSpec& spec);
void from_json(const nlohmann::json& j, MlpSpec& spec);
void to_json(nlohmann::json& j, const ToyDataset& data);
void from_json(const nlohmann::json& j, ToyDataset& data);
void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

}  // namespace landscape
