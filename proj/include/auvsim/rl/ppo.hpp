#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace auvsim::rl {

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 8;
  int micro_minibatch = 512;
  int macro_minibatch = 16;
  int micro_update = 2048;  // AUV buffer threshold, transitions
  int macro_update = 32;    // cAUV buffer threshold, macro transitions
  double actor_lr = 3e-5;
  double critic_lr = 5e-5;
  double macro_actor_lr = 3e-5;
  double macro_critic_lr = 5e-5;
  double entropy_coeff = 0.01;
  double max_grad_norm = 0.5;
  double adv_eps = 1e-8;
  bool normalize_advantages = true;
  // Multiplies rewards before they enter GAE; logged metrics stay raw.
  double reward_scale = 1.0;

  void validate() const;
};

// Zero mean, unit variance in place (population variance).
void normalize_advantages(std::span<double> adv, double eps);

// Per-sample clipped surrogate min(r A, clip(r, 1-e, 1+e) A).
double clipped_surrogate(double ratio, double advantage, double clip);

struct ActorLoss {
  double loss = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> d_log_prob;  // dL/d new log-prob, per sample
  double d_entropy = 0.0;          // dL/d entropy_i (same for every sample)
};

// L = -mean(surrogate) - entropy_coeff mean(entropy).
ActorLoss ppo_actor_loss(std::span<const double> new_log_prob, std::span<const double> old_log_prob,
                         std::span<const double> advantages, std::span<const double> entropy,
                         double clip, double entropy_coeff);

struct CriticLoss {
  double loss = 0.0;
  std::vector<double> d_value;
};

// L = mean((R - V)^2).
CriticLoss ppo_critic_loss(std::span<const double> values, std::span<const double> returns);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grads);

  double lr() const { return lr_; }
  long steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  double lr_ = 0.0, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Scales all gradient blocks jointly so their global L2 norm is at most
// max_norm. Returns the norm before clipping.
double clip_grad_norm(std::initializer_list<std::span<double>> grads, double max_norm);

}  // namespace auvsim::rl
