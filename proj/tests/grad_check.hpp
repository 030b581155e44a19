#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "osrf/nn.hpp"
#include "osrf/rng.hpp"

// Central finite-difference gradient oracle. A layer's backward pass is
// correct when the analytic gradient of s = sum(out .* R) matches the
// numeric derivative for every input element and every parameter.
namespace osrf_test {

using osrf::Rng;
using osrf::nn::Layer;
using osrf::nn::Tensor;

inline constexpr double kFdEps = 1e-5;
inline constexpr double kFdTol = 1e-4;

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

// Returns the worst relative error seen across input and parameter
// gradients.
inline double layer_gradient_error(Layer& layer, const Tensor& x, std::uint64_t seed) {
  Rng rng(seed);
  const Tensor probe = layer.apply(x);
  Tensor r = random_tensor(probe.shape, rng);

  auto scalar = [&](const Tensor& input) {
    const Tensor out = layer.apply(input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * r.data[i];
    return s;
  };

  for (osrf::nn::Tensor* g : layer.grads()) std::fill(g->data.begin(), g->data.end(), 0.0);
  layer.forward_cached(x);
  const Tensor grad_in = layer.backward(r);

  double worst = 0.0;
  auto compare = [&worst](double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };

  Tensor xp = x;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double keep = xp.data[i];
    xp.data[i] = keep + kFdEps;
    const double up = scalar(xp);
    xp.data[i] = keep - kFdEps;
    const double down = scalar(xp);
    xp.data[i] = keep;
    compare(grad_in.data[i], (up - down) / (2.0 * kFdEps));
  }

  const std::vector<Tensor*> params = layer.params();
  const std::vector<Tensor*> grads = layer.grads();
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      const double keep = params[p]->data[i];
      params[p]->data[i] = keep + kFdEps;
      const double up = scalar(x);
      params[p]->data[i] = keep - kFdEps;
      const double down = scalar(x);
      params[p]->data[i] = keep;
      compare(grads[p]->data[i], (up - down) / (2.0 * kFdEps));
    }
  }
  return worst;
}

// Same oracle for the fused loss(sigmoid(logits)) gradient.
inline double loss_gradient_error(osrf::nn::LossKind kind, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> z(n);
  for (double& v : z) v = rng.uniform(-2.0, 2.0);
  const std::size_t hot = static_cast<std::size_t>(rng.uniform_int(n));

  const std::vector<double> analytic = osrf::nn::loss_grad_logits(kind, osrf::nn::sigmoid(z), hot);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> zp = z;
    zp[i] += kFdEps;
    const double up = osrf::nn::loss_value(kind, osrf::nn::sigmoid(zp), hot);
    zp[i] -= 2.0 * kFdEps;
    const double down = osrf::nn::loss_value(kind, osrf::nn::sigmoid(zp), hot);
    const double numeric = (up - down) / (2.0 * kFdEps);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace osrf_test
