#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace auvsim::rl {

// Fully connected net, tanh on hidden layers and a linear output. Parameters
// live in one flat array: per layer the row-major (out x in) weight block
// followed by its bias vector.
class DenseNet {
 public:
  DenseNet() = default;
  explicit DenseNet(std::vector<std::size_t> widths);

  static std::size_t parameter_count(std::span<const std::size_t> widths);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_size() const { return widths_.front(); }
  std::size_t output_size() const { return widths_.back(); }
  std::size_t num_layers() const { return widths_.size() - 1; }
  std::size_t parameter_count() const { return params_.size(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + widths_[layer] * widths_[layer + 1];
  }

  // Orthogonal weights scaled by `hidden_gain` (last layer `output_gain`),
  // zero biases.
  void init_orthogonal(std::mt19937_64& rng, double hidden_gain, double output_gain);

  std::vector<double> forward(std::span<const double> x) const;

  struct Cache {
    std::size_t batch = 0;
    // act[0] is the input, act[k] the output of layer k (post-tanh if hidden).
    std::vector<std::vector<double>> act;
    std::vector<double> delta, delta_prev;
  };

  // x is batch x input_size, row-major. The output is cache.act.back().
  void forward_batch(std::span<const double> x, std::size_t batch, Cache& cache) const;

  // Accumulates dL/dparams into `grad` given dL/doutput (batch x output_size).
  // When `dx` is non-null it receives dL/dinput.
  void backward_batch(Cache& cache, std::span<const double> dout, std::span<double> grad,
                      std::vector<double>* dx = nullptr) const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace auvsim::rl
