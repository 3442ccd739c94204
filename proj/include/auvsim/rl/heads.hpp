#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "auvsim/vec3.hpp"

namespace auvsim::rl {

// Bounds of the micro action: power in [p_min, p_max], velocity in the ball
// of radius v_max.
struct ActionBounds {
  double p_min = 0.0;
  double p_max = 2.0;
  double v_max = 5.0;
};

// Dimension 0 is power, 1..3 velocity. Squashing maps u to the bounds:
// power by an affine tanh, velocity radially, v = v_max tanh(|u|) u / |u|.
inline constexpr std::size_t kMicroActionDim = 4;

struct SquashedAction {
  double power = 0.0;
  Vec3 velocity;
};

SquashedAction squash(std::span<const double> u, const ActionBounds& bounds);
// log |det d squash / du|.
double squash_log_det(std::span<const double> u, const ActionBounds& bounds);

// Diagonal Gaussian in pre-squash space.
double gaussian_log_prob(std::span<const double> u, std::span<const double> mean,
                         std::span<const double> log_std);
double gaussian_entropy(std::span<const double> log_std);

struct GaussianSample {
  std::vector<double> u;       // pre-squash draw, kept for the PPO ratio
  SquashedAction action;
  double log_prob = 0.0;       // pre-squash Gaussian log-density
  double log_prob_squashed = 0.0;  // density of the squashed action
  double entropy = 0.0;        // pre-squash entropy
};

// Reparameterised draw u = mean + exp(log_std) * n.
GaussianSample gaussian_head(std::span<const double> mean, std::span<const double> log_std,
                             const ActionBounds& bounds, std::mt19937_64& rng);
// Deterministic action: the squashed mean.
SquashedAction gaussian_mode(std::span<const double> mean, const ActionBounds& bounds);

// d log_prob / d mean and d log_prob / d log_std, written into the outputs.
void gaussian_log_prob_grad(std::span<const double> u, std::span<const double> mean,
                            std::span<const double> log_std, std::span<double> d_mean,
                            std::span<double> d_log_std);

struct BernoulliSample {
  std::vector<std::uint8_t> selection;
  std::vector<double> probabilities;
  double log_prob = 0.0;
  double entropy = 0.0;
};

double sigmoid(double z);
double softplus(double z);

double bernoulli_log_prob(std::span<const double> logits, std::span<const std::uint8_t> g);
double bernoulli_entropy(std::span<const double> logits);
BernoulliSample bernoulli_head(std::span<const double> logits, std::mt19937_64& rng);
// Selection with p > 0.5, i.e. logit > 0.
std::vector<std::uint8_t> bernoulli_mode(std::span<const double> logits);

// d log_prob / d logit_i = g_i - sigmoid(logit_i).
void bernoulli_log_prob_grad(std::span<const double> logits, std::span<const std::uint8_t> g,
                             std::span<double> d_logits);
// d entropy / d logit_i = -logit_i p_i (1 - p_i).
void bernoulli_entropy_grad(std::span<const double> logits, std::span<double> d_logits);

}  // namespace auvsim::rl
