#include "auvsim/rl/heads.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace auvsim::rl {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 ln(2 pi)

void check_dim(std::size_t n, const char* what) {
  if (n != kMicroActionDim) throw std::invalid_argument(std::string(what) + ": expected 4 values");
}

// log(1 - tanh(x)^2), stable for large |x|.
double log_sech2(double x) {
  const double ax = std::fabs(x);
  return 2.0 * (std::numbers::ln2 - ax - std::log1p(std::exp(-2.0 * ax)));
}

}  // namespace

SquashedAction squash(std::span<const double> u, const ActionBounds& b) {
  check_dim(u.size(), "squash");
  SquashedAction a;
  a.power = b.p_min + (b.p_max - b.p_min) * 0.5 * (std::tanh(u[0]) + 1.0);
  const Vec3 w{u[1], u[2], u[3]};
  const double rho = w.norm();
  if (rho > 0.0) a.velocity = w * (b.v_max * std::tanh(rho) / rho);
  return a;
}

double squash_log_det(std::span<const double> u, const ActionBounds& b) {
  check_dim(u.size(), "squash_log_det");
  double ld = std::log(0.5 * (b.p_max - b.p_min)) + log_sech2(u[0]);
  // Radial map g(rho) u/rho in 3-D: det = g'(rho) (g(rho)/rho)^2.
  const double rho = Vec3{u[1], u[2], u[3]}.norm();
  const double ratio = rho > 1e-8 ? std::tanh(rho) / rho : 1.0 - rho * rho / 3.0;
  ld += 3.0 * std::log(b.v_max) + log_sech2(rho) + 2.0 * std::log(ratio);
  return ld;
}

double gaussian_log_prob(std::span<const double> u, std::span<const double> mean,
                         std::span<const double> log_std) {
  if (u.size() != mean.size() || u.size() != log_std.size())
    throw std::invalid_argument("gaussian_log_prob: size mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z = (u[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double ls : log_std) h += ls + 0.5 + kHalfLog2Pi;
  return h;
}

GaussianSample gaussian_head(std::span<const double> mean, std::span<const double> log_std,
                             const ActionBounds& bounds, std::mt19937_64& rng) {
  check_dim(mean.size(), "gaussian_head");
  check_dim(log_std.size(), "gaussian_head");
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianSample s;
  s.u.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) s.u[i] = mean[i] + std::exp(log_std[i]) * normal(rng);
  s.action = squash(s.u, bounds);
  s.log_prob = gaussian_log_prob(s.u, mean, log_std);
  s.log_prob_squashed = s.log_prob - squash_log_det(s.u, bounds);
  s.entropy = gaussian_entropy(log_std);
  return s;
}

SquashedAction gaussian_mode(std::span<const double> mean, const ActionBounds& bounds) {
  return squash(mean, bounds);
}

void gaussian_log_prob_grad(std::span<const double> u, std::span<const double> mean,
                            std::span<const double> log_std, std::span<double> d_mean,
                            std::span<double> d_log_std) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double inv_var = std::exp(-2.0 * log_std[i]);
    const double diff = u[i] - mean[i];
    d_mean[i] = diff * inv_var;
    d_log_std[i] = diff * diff * inv_var - 1.0;
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double bernoulli_log_prob(std::span<const double> logits, std::span<const std::uint8_t> g) {
  if (logits.size() != g.size()) throw std::invalid_argument("bernoulli_log_prob: size mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    lp -= g[i] ? softplus(-logits[i]) : softplus(logits[i]);
  return lp;
}

double bernoulli_entropy(std::span<const double> logits) {
  double h = 0.0;
  for (double z : logits) h += softplus(z) - z * sigmoid(z);
  return h;
}

BernoulliSample bernoulli_head(std::span<const double> logits, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  BernoulliSample s;
  for (double z : logits) {
    const double p = sigmoid(z);
    s.probabilities.push_back(p);
    s.selection.push_back(unif(rng) < p ? 1 : 0);
  }
  s.log_prob = bernoulli_log_prob(logits, s.selection);
  s.entropy = bernoulli_entropy(logits);
  return s;
}

std::vector<std::uint8_t> bernoulli_mode(std::span<const double> logits) {
  std::vector<std::uint8_t> g;
  for (double z : logits) g.push_back(z > 0.0 ? 1 : 0);
  return g;
}

void bernoulli_log_prob_grad(std::span<const double> logits, std::span<const std::uint8_t> g,
                             std::span<double> d_logits) {
  for (std::size_t i = 0; i < logits.size(); ++i) d_logits[i] = (g[i] ? 1.0 : 0.0) - sigmoid(logits[i]);
}

void bernoulli_entropy_grad(std::span<const double> logits, std::span<double> d_logits) {
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = sigmoid(logits[i]);
    d_logits[i] = -logits[i] * p * (1.0 - p);
  }
}

}  // namespace auvsim::rl
