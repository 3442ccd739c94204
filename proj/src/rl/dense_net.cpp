#include "auvsim/rl/dense_net.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "auvsim/rl/kernels.hpp"

namespace auvsim::rl {
namespace {

void shape_error(const std::string& what) { throw std::invalid_argument("DenseNet: " + what); }

}  // namespace

DenseNet::DenseNet(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) shape_error("need at least input and output widths");
  for (std::size_t w : widths_)
    if (w == 0) shape_error("layer widths must be > 0");
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(off, 0.0);
}

std::size_t DenseNet::parameter_count(std::span<const std::size_t> widths) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l] * widths[l + 1] + widths[l + 1];
  return n;
}

void DenseNet::init_orthogonal(std::mt19937_64& rng, double hidden_gain, double output_gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const std::size_t k = std::min(in, out);
    const std::size_t n = std::max(in, out);
    std::vector<double> q(k * n);
    for (double& v : q) v = normal(rng);
    // Modified Gram-Schmidt over the k vectors of length n.
    for (std::size_t a = 0; a < k; ++a) {
      double* qa = q.data() + a * n;
      for (std::size_t b = 0; b < a; ++b) {
        const double* qb = q.data() + b * n;
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += qa[i] * qb[i];
        for (std::size_t i = 0; i < n; ++i) qa[i] -= proj * qb[i];
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm += qa[i] * qa[i];
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < n; ++i) qa[i] /= norm;
    }
    const double gain = l + 1 == num_layers() ? output_gain : hidden_gain;
    double* w = params_.data() + weight_offset(l);
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i)
        w[o * in + i] = gain * (out <= in ? q[o * n + i] : q[i * n + o]);
    double* b = params_.data() + bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) b[o] = 0.0;
  }
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  Cache cache;
  forward_batch(x, 1, cache);
  return cache.act.back();
}

void DenseNet::forward_batch(std::span<const double> x, std::size_t batch, Cache& cache) const {
  if (widths_.empty()) shape_error("forward on an empty net");
  if (x.size() != batch * input_size())
    shape_error("input has " + std::to_string(x.size()) + " values, expected " +
                std::to_string(batch * input_size()));
  const auto& k = kernels::active();
  cache.batch = batch;
  cache.act.resize(widths_.size());
  cache.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    auto& y = cache.act[l + 1];
    y.resize(batch * out);
    const auto& xin = cache.act[l];
    for (std::size_t s = 0; s < batch; ++s) k.affine(w, b, xin.data() + s * in, y.data() + s * out, out, in);
    if (l + 1 < num_layers())
      for (double& v : y) v = std::tanh(v);
  }
}

void DenseNet::backward_batch(Cache& cache, std::span<const double> dout, std::span<double> grad,
                              std::vector<double>* dx) const {
  const std::size_t batch = cache.batch;
  if (cache.act.size() != widths_.size()) shape_error("backward without a matching forward");
  if (dout.size() != batch * output_size()) shape_error("output gradient has the wrong size");
  if (grad.size() != params_.size()) shape_error("gradient buffer has the wrong size");
  const auto& k = kernels::active();
  cache.delta.assign(dout.begin(), dout.end());
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    const auto& xin = cache.act[l];
    for (std::size_t s = 0; s < batch; ++s) {
      const double* d = cache.delta.data() + s * out;
      const double* xs = xin.data() + s * in;
      for (std::size_t o = 0; o < out; ++o) {
        if (d[o] == 0.0) continue;
        k.axpy(d[o], xs, gw + o * in, in);
        gb[o] += d[o];
      }
    }
    if (l == 0 && !dx) break;
    cache.delta_prev.assign(batch * in, 0.0);
    for (std::size_t s = 0; s < batch; ++s) {
      const double* d = cache.delta.data() + s * out;
      double* dp = cache.delta_prev.data() + s * in;
      for (std::size_t o = 0; o < out; ++o)
        if (d[o] != 0.0) k.axpy(d[o], w + o * in, dp, in);
      if (l > 0) {
        const double* a = xin.data() + s * in;
        for (std::size_t i = 0; i < in; ++i) dp[i] *= 1.0 - a[i] * a[i];
      }
    }
    cache.delta.swap(cache.delta_prev);
  }
  if (dx) *dx = cache.delta;
}

}  // namespace auvsim::rl
