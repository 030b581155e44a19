#include "osrf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "osrf/errors.hpp"

namespace osrf::nn {

namespace {

constexpr double kProbEps = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

std::size_t shape_numel(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(shape_numel(shape), 0.0) {}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double sigmoid_value(double x) { return clamp_prob(1.0 / (1.0 + std::exp(-x))); }

std::vector<double> sigmoid(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid_value(x[i]);
  return out;
}

std::vector<double> softmax(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  const double mx = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

namespace {

class Conv1d final : public Layer {
 public:
  Conv1d(std::size_t in_ch, std::size_t out_ch)
      : in_ch_(in_ch), out_ch_(out_ch), w_({out_ch, in_ch, 3}), b_({out_ch}),
        gw_({out_ch, in_ch, 3}), gb_({out_ch}) {}

  std::string descriptor() const override { return "conv:" + std::to_string(out_ch_); }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    check_input(in);
    return {out_ch_, in[1] - 2};
  }

  Tensor apply(const Tensor& x) const override { return run(x); }

  Tensor forward_cached(const Tensor& x) override {
    cached_ = x;
    return run(x);
  }

  Tensor backward(const Tensor& g) override {
    const std::size_t L = cached_.shape[1];
    const std::size_t Lo = L - 2;
    if (g.shape != std::vector<std::size_t>{out_ch_, Lo}) throw ShapeMismatch("conv1d backward shape");
    Tensor gx({in_ch_, L});
    for (std::size_t oc = 0; oc < out_ch_; ++oc) {
      const double* gr = &g.data[oc * Lo];
      double gb = 0.0;
      for (std::size_t i = 0; i < Lo; ++i) gb += gr[i];
      gb_.data[oc] += gb;
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* xi = &cached_.data[ic * L];
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < Lo; ++i) {
          s0 += gr[i] * xi[i];
          s1 += gr[i] * xi[i + 1];
          s2 += gr[i] * xi[i + 2];
        }
        double* gw = &gw_.data[(oc * in_ch_ + ic) * 3];
        gw[0] += s0;
        gw[1] += s1;
        gw[2] += s2;
        const double* w = &w_.data[(oc * in_ch_ + ic) * 3];
        double* gxr = &gx.data[ic * L];
        const double w0 = w[0], w1 = w[1], w2 = w[2];
        for (std::size_t i = 0; i < Lo; ++i) gxr[i] += w0 * gr[i];
        for (std::size_t i = 0; i < Lo; ++i) gxr[i + 1] += w1 * gr[i];
        for (std::size_t i = 0; i < Lo; ++i) gxr[i + 2] += w2 * gr[i];
      }
    }
    return gx;
  }

  std::vector<Tensor*> params() override { return {&w_, &b_}; }
  std::vector<Tensor*> grads() override { return {&gw_, &gb_}; }

  void init_params(Rng& rng) override {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch_ * 3));
    for (double& v : w_.data) v = rng.uniform(-bound, bound);
    for (double& v : b_.data) v = rng.uniform(-bound, bound);
  }

 private:
  void check_input(const std::vector<std::size_t>& s) const {
    if (s.size() != 2 || s[0] != in_ch_ || s[1] < 3) throw ShapeMismatch("conv1d input shape");
  }

  Tensor run(const Tensor& x) const {
    check_input(x.shape);
    const std::size_t L = x.shape[1];
    const std::size_t Lo = L - 2;
    Tensor out({out_ch_, Lo});
    for (std::size_t oc = 0; oc < out_ch_; ++oc) {
      double* o = &out.data[oc * Lo];
      const double bias = b_.data[oc];
      for (std::size_t i = 0; i < Lo; ++i) o[i] = bias;
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* xi = &x.data[ic * L];
        const double* w = &w_.data[(oc * in_ch_ + ic) * 3];
        const double w0 = w[0], w1 = w[1], w2 = w[2];
        for (std::size_t i = 0; i < Lo; ++i) o[i] += w0 * xi[i] + w1 * xi[i + 1] + w2 * xi[i + 2];
      }
    }
    return out;
  }

  std::size_t in_ch_, out_ch_;
  Tensor w_, b_, gw_, gb_;
  Tensor cached_;
};

class Relu final : public Layer {
 public:
  std::string descriptor() const override { return "relu"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override { return in; }

  Tensor apply(const Tensor& x) const override {
    Tensor out = x;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
  }

  Tensor forward_cached(const Tensor& x) override {
    mask_.assign(x.data.size(), 0);
    Tensor out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      if (out.data[i] > 0.0) {
        mask_[i] = 1;
      } else {
        out.data[i] = 0.0;
      }
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    if (g.data.size() != mask_.size()) throw ShapeMismatch("relu backward shape");
    Tensor gx = g;
    for (std::size_t i = 0; i < gx.data.size(); ++i) {
      if (!mask_[i]) gx.data[i] = 0.0;
    }
    return gx;
  }

 private:
  std::vector<char> mask_;
};

class MaxPool1d final : public Layer {
 public:
  MaxPool1d(std::size_t pool, std::size_t stride) : pool_(pool), stride_(stride) {
    if (pool_ == 0 || stride_ == 0) throw ShapeMismatch("maxpool1d: pool and stride must be positive");
  }

  std::string descriptor() const override {
    if (stride_ == pool_) return "pool:" + std::to_string(pool_);
    return "pool:" + std::to_string(pool_) + "/" + std::to_string(stride_);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    check_input(in);
    return {in[0], (in[1] - pool_) / stride_ + 1};
  }

  Tensor apply(const Tensor& x) const override {
    std::vector<std::uint32_t> scratch;
    return run(x, scratch);
  }

  Tensor forward_cached(const Tensor& x) override {
    in_shape_ = x.shape;
    return run(x, argmax_);
  }

  Tensor backward(const Tensor& g) override {
    if (g.data.size() != argmax_.size()) throw ShapeMismatch("maxpool1d backward shape");
    Tensor gx(in_shape_);
    for (std::size_t i = 0; i < g.data.size(); ++i) gx.data[argmax_[i]] += g.data[i];
    return gx;
  }

 private:
  void check_input(const std::vector<std::size_t>& s) const {
    if (s.size() != 2 || s[1] < pool_) throw ShapeMismatch("maxpool1d input shape");
  }

  Tensor run(const Tensor& x, std::vector<std::uint32_t>& argmax) const {
    check_input(x.shape);
    const std::size_t ch = x.shape[0];
    const std::size_t L = x.shape[1];
    const std::size_t Lo = (L - pool_) / stride_ + 1;
    Tensor out({ch, Lo});
    argmax.assign(ch * Lo, 0);
    for (std::size_t c = 0; c < ch; ++c) {
      const double* xi = &x.data[c * L];
      double* o = &out.data[c * Lo];
      for (std::size_t i = 0; i < Lo; ++i) {
        const std::size_t base = i * stride_;
        double best = xi[base];
        std::size_t best_k = base;
        for (std::size_t k = 1; k < pool_; ++k) {
          if (xi[base + k] > best) {  // strict: ties go to the lowest index
            best = xi[base + k];
            best_k = base + k;
          }
        }
        o[i] = best;
        argmax[c * Lo + i] = static_cast<std::uint32_t>(c * L + best_k);
      }
    }
    return out;
  }

  std::size_t pool_, stride_;
  std::vector<std::uint32_t> argmax_;
  std::vector<std::size_t> in_shape_;
};

class Flatten final : public Layer {
 public:
  std::string descriptor() const override { return "flatten"; }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return {shape_numel(in)};
  }

  Tensor apply(const Tensor& x) const override {
    Tensor out = x;
    out.shape = {x.data.size()};
    return out;
  }

  Tensor forward_cached(const Tensor& x) override {
    in_shape_ = x.shape;
    return apply(x);
  }

  Tensor backward(const Tensor& g) override {
    Tensor gx = g;
    gx.shape = in_shape_;
    return gx;
  }

 private:
  std::vector<std::size_t> in_shape_;
};

class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out)
      : in_(in), out_(out), w_({out, in}), b_({out}), gw_({out, in}), gb_({out}) {}

  std::string descriptor() const override { return "dense:" + std::to_string(out_); }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    check_input(in);
    return {out_};
  }

  Tensor apply(const Tensor& x) const override { return run(x); }

  Tensor forward_cached(const Tensor& x) override {
    cached_ = x;
    return run(x);
  }

  Tensor backward(const Tensor& g) override {
    if (g.shape != std::vector<std::size_t>{out_}) throw ShapeMismatch("dense backward shape");
    Tensor gx({in_});
    for (std::size_t o = 0; o < out_; ++o) {
      const double go = g.data[o];
      gb_.data[o] += go;
      const double* w = &w_.data[o * in_];
      double* gw = &gw_.data[o * in_];
      const double* x = cached_.data.data();
      for (std::size_t i = 0; i < in_; ++i) gw[i] += go * x[i];
      for (std::size_t i = 0; i < in_; ++i) gx.data[i] += go * w[i];
    }
    return gx;
  }

  std::vector<Tensor*> params() override { return {&w_, &b_}; }
  std::vector<Tensor*> grads() override { return {&gw_, &gb_}; }

  void init_params(Rng& rng) override {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
    for (double& v : w_.data) v = rng.uniform(-bound, bound);
    for (double& v : b_.data) v = rng.uniform(-bound, bound);
  }

 private:
  void check_input(const std::vector<std::size_t>& s) const {
    if (s.size() != 1 || s[0] != in_) throw ShapeMismatch("dense input shape");
  }

  Tensor run(const Tensor& x) const {
    check_input(x.shape);
    Tensor out({out_});
    for (std::size_t o = 0; o < out_; ++o) {
      const double* w = &w_.data[o * in_];
      double acc = b_.data[o];
      for (std::size_t i = 0; i < in_; ++i) acc += w[i] * x.data[i];
      out.data[o] = acc;
    }
    return out;
  }

  std::size_t in_, out_;
  Tensor w_, b_, gw_, gb_;
  Tensor cached_;
};

class SigmoidLayer final : public Layer {
 public:
  std::string descriptor() const override { return "sigmoid"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override { return in; }

  Tensor apply(const Tensor& x) const override {
    Tensor out = x;
    for (double& v : out.data) v = sigmoid_value(v);
    return out;
  }

  Tensor forward_cached(const Tensor& x) override {
    Tensor out = apply(x);
    cached_out_ = out;
    return out;
  }

  Tensor backward(const Tensor& g) override {
    if (g.data.size() != cached_out_.data.size()) throw ShapeMismatch("sigmoid backward shape");
    Tensor gx = g;
    for (std::size_t i = 0; i < gx.data.size(); ++i) {
      const double p = cached_out_.data[i];
      gx.data[i] *= p * (1.0 - p);
    }
    return gx;
  }

 private:
  Tensor cached_out_;
};

class SoftmaxLayer final : public Layer {
 public:
  std::string descriptor() const override { return "softmax"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override { return in; }

  Tensor apply(const Tensor& x) const override {
    Tensor out = x;
    out.data = softmax(x.data);
    return out;
  }

  Tensor forward_cached(const Tensor& x) override {
    Tensor out = apply(x);
    cached_out_ = out;
    return out;
  }

  Tensor backward(const Tensor& g) override {
    if (g.data.size() != cached_out_.data.size()) throw ShapeMismatch("softmax backward shape");
    const std::vector<double>& p = cached_out_.data;
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += g.data[i] * p[i];
    Tensor gx = g;
    for (std::size_t i = 0; i < p.size(); ++i) gx.data[i] = p[i] * (g.data[i] - dot);
    return gx;
  }

 private:
  Tensor cached_out_;
};

}  // namespace

std::unique_ptr<Layer> make_conv1d(std::size_t in_ch, std::size_t out_ch) {
  return std::make_unique<Conv1d>(in_ch, out_ch);
}
std::unique_ptr<Layer> make_relu() { return std::make_unique<Relu>(); }
std::unique_ptr<Layer> make_maxpool1d(std::size_t pool, std::size_t stride) {
  return std::make_unique<MaxPool1d>(pool, stride);
}
std::unique_ptr<Layer> make_flatten() { return std::make_unique<Flatten>(); }
std::unique_ptr<Layer> make_dense(std::size_t in, std::size_t out) { return std::make_unique<Dense>(in, out); }
std::unique_ptr<Layer> make_sigmoid() { return std::make_unique<SigmoidLayer>(); }
std::unique_ptr<Layer> make_softmax() { return std::make_unique<SoftmaxLayer>(); }

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> tokens;
  std::string tok;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!tok.empty()) tokens.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) tokens.push_back(tok);
  return tokens;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  try {
    const long v = std::stol(s);
    if (v <= 0) throw std::invalid_argument("");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InvalidConfig("bad " + what + " in architecture descriptor: " + s);
  }
}

}  // namespace

Model Model::build(const std::string& descriptor, std::vector<std::size_t> input_shape,
                   std::vector<std::string> class_names, std::uint64_t init_seed) {
  if (class_names.empty()) throw InvalidConfig("model needs at least one class");
  if (input_shape.size() != 2 || input_shape[0] == 0 || input_shape[1] == 0)
    throw InvalidConfig("model input shape must be {channels, length}");

  std::vector<std::string> tokens = split_tokens(descriptor);
  if (tokens.empty() || tokens.back() != "sigmoid") {
    tokens.push_back("dense:" + std::to_string(class_names.size()));
    tokens.push_back("sigmoid");
  }

  Model m;
  m.input_shape_ = input_shape;
  m.class_names_ = std::move(class_names);
  std::vector<std::size_t> shape = input_shape;
  for (const std::string& tok : tokens) {
    const std::size_t colon = tok.find(':');
    const std::string kind = tok.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : tok.substr(colon + 1);
    std::unique_ptr<Layer> layer;
    if (kind == "conv") {
      if (shape.size() != 2) throw InvalidConfig("conv layer needs a {channels, length} input");
      layer = make_conv1d(shape[0], parse_size(arg, "conv width"));
    } else if (kind == "relu") {
      layer = make_relu();
    } else if (kind == "pool") {
      const std::size_t slash = arg.find('/');
      const std::size_t pool = parse_size(slash == std::string::npos ? arg : arg.substr(0, slash), "pool size");
      const std::size_t stride = slash == std::string::npos ? pool : parse_size(arg.substr(slash + 1), "pool stride");
      layer = make_maxpool1d(pool, stride);
    } else if (kind == "dense") {
      if (shape.size() != 1) {
        auto fl = make_flatten();
        shape = fl->output_shape(shape);
        m.layers_.push_back(std::move(fl));
      }
      layer = make_dense(shape[0], parse_size(arg, "dense width"));
    } else if (kind == "flatten") {
      layer = make_flatten();
    } else if (kind == "sigmoid") {
      layer = make_sigmoid();
    } else if (kind == "softmax") {
      layer = make_softmax();
    } else {
      throw InvalidConfig("unknown layer token: " + tok);
    }
    shape = layer->output_shape(shape);
    m.layers_.push_back(std::move(layer));
  }

  if (m.layers_.size() < 2 || m.layers_.back()->descriptor() != "sigmoid" ||
      shape != std::vector<std::size_t>{m.class_names_.size()})
    throw InvalidConfig("architecture must end with dense:<num classes> followed by sigmoid");

  std::size_t idx = 0;
  for (auto& layer : m.layers_) {
    Rng rng(derive_seed(init_seed, "layer:" + std::to_string(idx++)));
    layer->init_params(rng);
  }

  std::string full;
  for (const auto& layer : m.layers_) {
    if (!full.empty()) full += ",";
    full += layer->descriptor();
  }
  m.descriptor_ = full;
  return m;
}

Tensor Model::to_input_tensor(const FeatureTensor& f) const {
  if (f.rows != input_shape_[0] || f.cols != input_shape_[1])
    throw ShapeMismatch("feature tensor does not match the model input shape");
  Tensor x({f.rows, f.cols});
  std::copy(f.values.begin(), f.values.end(), x.data.begin());
  return x;
}

Activations Model::predict(const Tensor& input) const {
  Tensor x = input;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) x = layers_[i]->apply(x);
  Activations a;
  a.logits = x.data;
  a.sigmoids = sigmoid(a.logits);
  return a;
}

Activations Model::predict(const FeatureTensor& features) const { return predict(to_input_tensor(features)); }

std::vector<Tensor*> Model::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* p : l->params()) out.push_back(p);
  }
  return out;
}

std::vector<const Tensor*> Model::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    for (Tensor* p : const_cast<Layer&>(*l).params()) out.push_back(p);
  }
  return out;
}

std::vector<Tensor*> Model::gradients() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* g : l->grads()) out.push_back(g);
  }
  return out;
}

std::vector<Layer*> Model::layers() {
  std::vector<Layer*> out;
  for (auto& l : layers_) out.push_back(l.get());
  return out;
}

Tensor Model::forward_logits_cached(const Tensor& x) {
  Tensor t = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) t = layers_[i]->forward_cached(t);
  return t;
}

void Model::backward_from_logits(const Tensor& grad_logits) {
  Tensor g = grad_logits;
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->backward(g);
}

// ---------------------------------------------------------------------------
// Losses, Adam, training
// ---------------------------------------------------------------------------

LossKind loss_from_string(const std::string& name) {
  if (name == "cce") return LossKind::Cce;
  if (name == "cce-raw") return LossKind::CceRaw;
  if (name == "bce") return LossKind::Bce;
  throw InvalidConfig("unknown loss: " + name);
}

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::Cce: return "cce";
    case LossKind::CceRaw: return "cce-raw";
    case LossKind::Bce: return "bce";
  }
  return "?";
}

double categorical_cross_entropy(const std::vector<double>& probs, std::size_t hot) {
  if (hot >= probs.size()) throw InvalidLabel("label index out of range");
  return -std::log(clamp_prob(probs[hot]));
}

double bce_loss(const std::vector<double>& probs, std::size_t hot) {
  if (hot >= probs.size()) throw InvalidLabel("label index out of range");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    loss -= i == hot ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

double loss_value(LossKind kind, const std::vector<double>& probs, std::size_t hot) {
  switch (kind) {
    case LossKind::CceRaw:
      return categorical_cross_entropy(probs, hot);
    case LossKind::Bce:
      return bce_loss(probs, hot);
    case LossKind::Cce: {
      if (hot >= probs.size()) throw InvalidLabel("label index out of range");
      double sum = 0.0;
      for (double p : probs) sum += clamp_prob(p);
      return std::log(sum) - std::log(clamp_prob(probs[hot]));
    }
  }
  throw InvalidLabel("bad loss kind");
}

std::vector<double> loss_grad_logits(LossKind kind, const std::vector<double>& probs, std::size_t hot) {
  if (hot >= probs.size()) throw InvalidLabel("label index out of range");
  std::vector<double> g(probs.size(), 0.0);
  switch (kind) {
    case LossKind::CceRaw:
      g[hot] = probs[hot] - 1.0;
      break;
    case LossKind::Bce:
      for (std::size_t i = 0; i < probs.size(); ++i) g[i] = probs[i] - (i == hot ? 1.0 : 0.0);
      break;
    case LossKind::Cce: {
      double sum = 0.0;
      for (double p : probs) sum += clamp_prob(p);
      for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        g[i] = p * (1.0 - p) / sum;
        if (i == hot) g[i] -= 1.0 - p;
      }
      break;
    }
  }
  return g;
}

void AdamState::init(const std::vector<Tensor*>& params, const AdamConfig& c) {
  cfg = c;
  t = 0;
  m.clear();
  v.clear();
  for (const Tensor* p : params) {
    m.emplace_back(p->shape);
    v.emplace_back(p->shape);
  }
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeMismatch("adam_step: parameter/gradient/state mismatch");
  state.t += 1;
  const double b1 = state.cfg.beta1;
  const double b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p];
    const Tensor& g = *grads[p];
    if (w.data.size() != g.data.size()) throw ShapeMismatch("adam_step: gradient shape");
    Tensor& mp = state.m[p];
    Tensor& vp = state.v[p];
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      const double gi = g.data[i];
      mp.data[i] = b1 * mp.data[i] + (1.0 - b1) * gi;
      vp.data[i] = b2 * vp.data[i] + (1.0 - b2) * gi * gi;
      const double mhat = mp.data[i] / bc1;
      const double vhat = vp.data[i] / bc2;
      w.data[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
}

TrainLog train(Model& model, const std::vector<Example>& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw EmptyDataset("train: empty dataset");
  const std::size_t n_classes = model.num_classes();
  for (const Example& ex : data) {
    if (ex.label >= n_classes) throw LabelOutOfRange("train: label outside [0, N)");
  }

  std::vector<Tensor*> params = model.parameters();
  std::vector<Tensor*> grads = model.gradients();
  AdamState adam;
  adam.init(params, cfg.adam);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainLog log;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.shuffle_seed, "epoch:" + std::to_string(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < data.size(); start += cfg.batch_size) {
      const std::size_t bn = std::min(cfg.batch_size, data.size() - start);
      for (Tensor* g : grads) std::fill(g->data.begin(), g->data.end(), 0.0);
      for (std::size_t b = 0; b < bn; ++b) {
        const Example& ex = data[order[start + b]];
        Tensor x({ex.rows, ex.cols});
        std::copy(ex.values.begin(), ex.values.end(), x.data.begin());
        Tensor z = model.forward_logits_cached(x);
        const std::vector<double> probs = sigmoid(z.data);
        loss_sum += loss_value(cfg.loss, probs, ex.label);
        std::vector<double> gz = loss_grad_logits(cfg.loss, probs, ex.label);
        for (double& v : gz) v /= static_cast<double>(bn);
        Tensor gt({n_classes});
        gt.data = std::move(gz);
        model.backward_from_logits(gt);
      }
      adam_step(params, grads, adam);
    }

    const double epoch_loss = loss_sum / static_cast<double>(data.size());
    if (!std::isfinite(epoch_loss)) throw NumericalError("non-finite training loss");
    for (const Tensor* p : params) {
      if (!p->all_finite()) throw NumericalError("non-finite model weight after epoch");
    }
    log.epoch_mean_loss.push_back(epoch_loss);
  }
  return log;
}

}  // namespace osrf::nn
