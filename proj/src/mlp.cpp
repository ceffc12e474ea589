#include "landscape/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "landscape/digest.hpp"
#include "landscape/error.hpp"
#include "landscape/random.hpp"

namespace landscape {

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l < layer_widths.size(); ++l) n += layer_widths[l] * layer_widths[l - 1] + layer_widths[l];
  return n;
}

void MlpSpec::validate() const {
  if (layer_widths.size() < 2) throw UsageError("mlp spec needs at least input and output widths");
  for (std::size_t w : layer_widths) {
    if (w == 0) throw UsageError("mlp layer widths must be positive");
  }
  if (loss == LossKind::kMse && layer_widths.back() != 1) throw UsageError("mse loss needs output width 1");
  if (loss == LossKind::kCrossEntropy && layer_widths.back() < 2) {
    throw UsageError("cross-entropy loss needs output width >= 2");
  }
}

void ToyDataset::validate() const {
  if (count == 0) throw UsageError("dataset must contain at least one sample");
  if (features == 0) throw UsageError("dataset must have at least one feature");
  if (inputs.size() != count * features) throw UsageError("dataset inputs size does not match count x features");
  if (targets.size() != count) throw UsageError("dataset targets size does not match count");
}

namespace {

double activate(Activation a, double z) { return a == Activation::kTanh ? std::tanh(z) : (z > 0.0 ? z : 0.0); }

// Derivative expressed through the pre-activation.
double activate_grad(Activation a, double z) {
  if (a == Activation::kTanh) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  }
  return z > 0.0 ? 1.0 : 0.0;
}

void check_compatible(const MlpSpec& spec, const ToyDataset& data) {
  spec.validate();
  data.validate();
  if (spec.layer_widths.front() != data.features) {
    throw UsageError("mlp input width " + std::to_string(spec.layer_widths.front()) + " does not match dataset features " +
                     std::to_string(data.features));
  }
  if (spec.loss == LossKind::kCrossEntropy) {
    const double classes = static_cast<double>(spec.layer_widths.back());
    for (double t : data.targets) {
      if (t < 0.0 || t >= classes || t != std::floor(t)) {
        throw UsageError("cross-entropy targets must be integer labels below the output width");
      }
    }
  }
}

}  // namespace

MlpOracle::MlpOracle(MlpSpec spec, ToyDataset data, ParamVector origin)
    : spec_(std::move(spec)), data_(std::move(data)), origin_(std::move(origin)) {
  check_compatible(spec_, data_);
  dim_ = spec_.param_count();
  if (!origin_.empty() && origin_.size() != dim_) {
    throw UsageError("mlp origin has length " + std::to_string(origin_.size()) + ", expected " + std::to_string(dim_));
  }
}

std::string MlpOracle::id() const {
  Fnv1a h;
  for (std::size_t w : spec_.layer_widths) h.update_u64(w);
  h.update_u64(static_cast<std::uint64_t>(spec_.activation));
  h.update_u64(static_cast<std::uint64_t>(spec_.loss));
  h.update(data_.inputs);
  h.update(data_.targets);
  return "mlp-" + h.hex();
}

ParamVector MlpOracle::default_origin() const { return origin_.empty() ? ParamVector(dim_, 0.0) : origin_; }

double MlpOracle::loss_and_gradient(std::span<const double> theta, std::span<const std::size_t> samples,
                                    ParamVector* grad) const {
  const auto& widths = spec_.layer_widths;
  const std::size_t layers = widths.size() - 1;
  if (grad) grad->assign(dim_, 0.0);

  std::vector<std::size_t> offsets(layers);
  for (std::size_t l = 0, off = 0; l < layers; ++l) {
    offsets[l] = off;
    off += widths[l + 1] * widths[l] + widths[l + 1];
  }

  // pre[l] holds z of layer l+1, act[l] holds its input a_l (act[0] = x).
  std::vector<std::vector<double>> pre(layers), act(layers + 1);
  for (std::size_t l = 0; l < layers; ++l) pre[l].resize(widths[l + 1]);
  for (std::size_t l = 0; l <= layers; ++l) act[l].resize(widths[l]);
  std::vector<double> delta, next_delta;

  double total = 0.0;
  for (std::size_t s : samples) {
    const auto x = data_.row(s);
    std::copy(x.begin(), x.end(), act[0].begin());
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = widths[l], out = widths[l + 1];
      const double* w = theta.data() + offsets[l];
      const double* b = w + out * in;
      for (std::size_t o = 0; o < out; ++o) {
        double z = b[o];
        for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * act[l][i];
        pre[l][o] = z;
        act[l + 1][o] = (l + 1 == layers) ? z : activate(spec_.activation, z);
      }
    }

    const auto& out = act[layers];
    const double target = data_.targets[s];
    delta.assign(out.size(), 0.0);
    if (spec_.loss == LossKind::kMse) {
      const double r = out[0] - target;
      total += r * r;
      delta[0] = 2.0 * r;
    } else {
      const double zmax = *std::max_element(out.begin(), out.end());
      double sum = 0.0;
      for (double z : out) sum += std::exp(z - zmax);
      const double lse = zmax + std::log(sum);
      const auto label = static_cast<std::size_t>(target);
      total += lse - out[label];
      for (std::size_t o = 0; o < out.size(); ++o) delta[o] = std::exp(out[o] - lse) - (o == label ? 1.0 : 0.0);
    }
    if (!grad) continue;

    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = widths[l], outw = widths[l + 1];
      const double* w = theta.data() + offsets[l];
      double* gw = grad->data() + offsets[l];
      double* gb = gw + outw * in;
      for (std::size_t o = 0; o < outw; ++o) {
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * act[l][i];
        gb[o] += delta[o];
      }
      if (l == 0) break;
      next_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < outw; ++o) {
        for (std::size_t i = 0; i < in; ++i) next_delta[i] += w[o * in + i] * delta[o];
      }
      for (std::size_t i = 0; i < in; ++i) next_delta[i] *= activate_grad(spec_.activation, pre[l - 1][i]);
      delta.swap(next_delta);
    }
  }

  const double inv = 1.0 / static_cast<double>(samples.size());
  if (grad) {
    for (double& g : *grad) g *= inv;
  }
  return total * inv;
}

double MlpOracle::value(std::span<const double> theta) const {
  std::vector<std::size_t> all(data_.count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradient(theta, all, nullptr);
}

ParamVector MlpOracle::gradient(std::span<const double> theta) const {
  std::vector<std::size_t> all(data_.count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  ParamVector g;
  loss_and_gradient(theta, all, &g);
  return g;
}

std::vector<double> MlpOracle::predict(std::span<const double> theta, std::span<const double> input) const {
  const auto& widths = spec_.layer_widths;
  std::vector<double> a(input.begin(), input.end()), next;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    const double* w = theta.data() + off;
    const double* b = w + out * in;
    next.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * a[i];
      next[o] = (l + 2 == widths.size()) ? z : activate(spec_.activation, z);
    }
    a.swap(next);
    off += out * in + out;
  }
  return a;
}

ParamVector init_mlp_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParamVector theta;
  theta.reserve(spec.param_count());
  for (std::size_t l = 1; l < spec.layer_widths.size(); ++l) {
    const std::size_t in = spec.layer_widths[l - 1], out = spec.layer_widths[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t i = 0; i < in * out; ++i) theta.push_back(rng.uniform(-limit, limit));
    theta.insert(theta.end(), out, 0.0);
  }
  return theta;
}

ParamVector train_mlp(const MlpSpec& spec, const ToyDataset& data, const TrainConfig& cfg) {
  check_compatible(spec, data);
  if (cfg.batch == 0) throw UsageError("batch size must be positive");
  if (!(cfg.lr > 0.0)) throw UsageError("learning rate must be positive");

  ParamVector theta = init_mlp_params(spec, cfg.seed);
  if (cfg.epochs == 0) return theta;

  const MlpOracle oracle(spec, data);
  // Separate stream so the shuffle order does not depend on the layer sizes.
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  ParamVector grad;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      oracle.loss_and_gradient(theta, std::span(order).subspan(start, stop - start), &grad);
      for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.lr * (grad[k] + cfg.weight_decay * theta[k]);
    }
    const double loss = oracle.value(theta);
    if (!std::isfinite(loss)) throw NumericError("training diverged at epoch " + std::to_string(epoch));
  }
  return theta;
}

double classification_accuracy(const MlpOracle& oracle, std::span<const double> theta) {
  if (oracle.spec().loss != LossKind::kCrossEntropy) throw UsageError("accuracy requires a classification network");
  const auto& data = oracle.data();
  std::size_t hits = 0;
  for (std::size_t s = 0; s < data.count; ++s) {
    const auto out = oracle.predict(theta, data.row(s));
    const auto best = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
    if (static_cast<double>(best) == data.targets[s]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.count);
}

ToyDataset make_two_class_dataset(std::size_t count, std::uint64_t seed, double separation, double noise,
                                  double label_noise) {
  Rng rng(seed);
  ToyDataset data;
  data.count = count;
  data.features = 2;
  data.inputs.reserve(2 * count);
  data.targets.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 2);
    const double cx = (label == 0 ? -0.5 : 0.5) * separation;
    data.inputs.push_back(cx + noise * rng.normal());
    data.inputs.push_back(noise * rng.normal());
    const bool flip = rng.uniform() < label_noise;
    data.targets.push_back(static_cast<double>(flip ? 1 - label : label));
  }
  return data;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const MlpSpec& spec) {
  j = nlohmann::json{{"layer_widths", spec.layer_widths},
                     {"activation", spec.activation == Activation::kTanh ? "tanh" : "relu"},
                     {"loss", spec.loss == LossKind::kMse ? "mse" : "cross-entropy"}};
}

void from_json(const nlohmann::json& j, MlpSpec& spec) {
  try {
    spec.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
    const auto act = j.at("activation").get<std::string>();
    const auto loss = j.at("loss").get<std::string>();
    if (act == "tanh") spec.activation = Activation::kTanh;
    else if (act == "relu") spec.activation = Activation::kRelu;
    else throw FormatError("unknown activation '" + act + "' (expected tanh or relu)");
    if (loss == "mse") spec.loss = LossKind::kMse;
    else if (loss == "cross-entropy") spec.loss = LossKind::kCrossEntropy;
    else throw FormatError("unknown loss '" + loss + "' (expected mse or cross-entropy)");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid mlp spec: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ToyDataset& data) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < data.count; ++i) {
    const auto r = data.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j = nlohmann::json{{"inputs", std::move(rows)}, {"targets", data.targets}};
}

void from_json(const nlohmann::json& j, ToyDataset& data) {
  try {
    const auto& rows = j.at("inputs");
    data.targets = j.at("targets").get<std::vector<double>>();
    data.count = rows.size();
    data.features = rows.empty() ? 0 : rows.front().size();
    data.inputs.clear();
    for (const auto& r : rows) {
      const auto v = r.get<std::vector<double>>();
      if (v.size() != data.features) throw FormatError("dataset rows have inconsistent widths");
      data.inputs.insert(data.inputs.end(), v.begin(), v.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid dataset: ") + e.what());
  }
  data.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"epochs", cfg.epochs},
                     {"lr", cfg.lr},
                     {"batch", cfg.batch},
                     {"weight_decay", cfg.weight_decay},
                     {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  try {
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.batch = j.value("batch", cfg.batch);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid training config: ") + e.what());
  }
}

}  // namespace landscape
