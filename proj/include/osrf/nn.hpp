#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "osrf/features.hpp"
#include "osrf/rng.hpp"

namespace osrf::nn {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }
  std::size_t numel() const { return data.size(); }
  bool all_finite() const;
};

// Element-wise activations. Sigmoid output is clamped to
// [1e-12, 1 - 1e-12] so log-loss and threshold comparisons against 0 and 1
// stay exact even for saturated logits.
double sigmoid_value(double x);
std::vector<double> sigmoid(const std::vector<double>& x);
std::vector<double> softmax(const std::vector<double>& x);  // max-subtracted

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string descriptor() const = 0;
  virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
  // Inference path: no state mutation, safe to call concurrently.
  virtual Tensor apply(const Tensor& x) const = 0;
  // Training path: caches what backward needs.
  virtual Tensor forward_cached(const Tensor& x) = 0;
  // Consumes the cache; accumulates parameter gradients (+=).
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual std::vector<Tensor*> params() { return {}; }
  virtual std::vector<Tensor*> grads() { return {}; }
  virtual void init_params(Rng&) {}
};

std::unique_ptr<Layer> make_conv1d(std::size_t in_ch, std::size_t out_ch);  // kernel 3, stride 1
std::unique_ptr<Layer> make_relu();
std::unique_ptr<Layer> make_maxpool1d(std::size_t pool, std::size_t stride);
std::unique_ptr<Layer> make_flatten();
std::unique_ptr<Layer> make_dense(std::size_t in, std::size_t out);
std::unique_ptr<Layer> make_sigmoid();
std::unique_ptr<Layer> make_softmax();

struct Activations {
  std::vector<double> logits;    // final dense outputs
  std::vector<double> sigmoids;  // clamped sigmoid of the logits
};

// A sequential model whose final two layers are Dense(N) + Sigmoid. Built
// from a descriptor like
//   "conv:16,relu,pool:4,conv:32,relu,pool:4,conv:64,relu,pool:4,dense:128,relu"
// to which the classifier head (dense:N,sigmoid) is appended automatically
// when absent. "pool:p" uses stride p; "pool:p/s" sets the stride.
class Model {
 public:
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  static Model build(const std::string& descriptor, std::vector<std::size_t> input_shape,
                     std::vector<std::string> class_names, std::uint64_t init_seed);

  std::size_t num_classes() const { return class_names_.size(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<std::size_t>& input_shape() const { return input_shape_; }
  const std::string& descriptor() const { return descriptor_; }

  // Thread-safe on an immutable model.
  Activations predict(const FeatureTensor& features) const;
  Activations predict(const Tensor& input) const;

  Tensor to_input_tensor(const FeatureTensor& features) const;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::vector<Tensor*> gradients();
  std::vector<Layer*> layers();

  // Training helpers: forward through everything but the final sigmoid.
  Tensor forward_logits_cached(const Tensor& x);
  void backward_from_logits(const Tensor& grad_logits);

 private:
  Model() = default;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::size_t> input_shape_;
  std::vector<std::string> class_names_;
  std::string descriptor_;
};

// Training losses over the sigmoid output vector.
//
// Cce ("cce", the default) renormalizes the sigmoid outputs by their sum
// before taking -log p, the way mainstream frameworks compute categorical
// cross-entropy on probability vectors. The renormalization matters: the
// bare -sum y_i log p_i form ("cce-raw") never penalizes a wrong class's
// activation, so a network can drive every output high on every input and
// reach a global optimum that classifies nothing.
// Bce ("bce") is one-vs-rest binary cross-entropy, kept behind a config
// flag for comparison.
enum class LossKind { Cce, CceRaw, Bce };
LossKind loss_from_string(const std::string& name);
std::string to_string(LossKind k);

// The classic definition: -sum y_i log p_i on clamped probabilities.
double categorical_cross_entropy(const std::vector<double>& probs, std::size_t hot);
double bce_loss(const std::vector<double>& probs, std::size_t hot);
double loss_value(LossKind kind, const std::vector<double>& probs, std::size_t hot);
// Gradient w.r.t. the sigmoid pre-activations, fused for numerical safety.
std::vector<double> loss_grad_logits(LossKind kind, const std::vector<double>& probs, std::size_t hot);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t t = 0;
  AdamConfig cfg;

  void init(const std::vector<Tensor*>& params, const AdamConfig& c);
};

// Standard bias-corrected update; increments state.t.
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, AdamState& state);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  std::uint64_t shuffle_seed = 0;
  AdamConfig adam;
  LossKind loss = LossKind::Cce;

  void validate() const;
};

// In-memory training example; feature values are stored single-precision
// (they live in [0,1]) and widened on the fly.
struct Example {
  std::vector<float> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint32_t label = 0;
};

struct TrainLog {
  std::vector<double> epoch_mean_loss;
};

// Seeded-shuffle mini-batch training with gradient averaging. Deterministic:
// same model init, shuffle seed, and data give bit-identical weights.
// Throws NumericalError if a loss or weight goes non-finite.
TrainLog train(Model& model, const std::vector<Example>& data, const TrainConfig& cfg);

// Model file I/O. Layout: magic "OSRFMDL1", u32 version, length-prefixed
// JSON header (descriptor, class names, input shape), parameter tensors as
// little-endian f64 in layer order, trailing CRC-32 of all preceding bytes.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);
std::uint32_t file_checksum(const std::string& path);  // CRC-32 of the whole file

}  // namespace osrf::nn
