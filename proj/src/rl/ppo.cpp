#include "auvsim/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace auvsim::rl {

void PpoConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ppo.") + key + ": " + what);
  };
  require(clip > 0.0 && clip < 1.0, "clip", "must lie in (0, 1)");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
  require(lambda > 0.0 && lambda <= 1.0, "lambda", "must lie in (0, 1]");
  require(epochs >= 1, "epochs", "must be >= 1");
  require(micro_minibatch >= 1, "micro_minibatch", "must be >= 1");
  require(macro_minibatch >= 1, "macro_minibatch", "must be >= 1");
  require(micro_update >= 1, "micro_update", "must be >= 1");
  require(macro_update >= 1, "macro_update", "must be >= 1");
  require(actor_lr > 0.0, "actor_lr", "must be > 0");
  require(critic_lr > 0.0, "critic_lr", "must be > 0");
  require(macro_actor_lr > 0.0, "macro_actor_lr", "must be > 0");
  require(macro_critic_lr > 0.0, "macro_critic_lr", "must be > 0");
  require(entropy_coeff >= 0.0, "entropy_coeff", "must be >= 0");
  require(max_grad_norm > 0.0, "max_grad_norm", "must be > 0");
  require(reward_scale > 0.0, "reward_scale", "must be > 0");
}

void normalize_advantages(std::span<double> adv, double eps) {
  if (adv.empty()) return;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double inv = 1.0 / (std::sqrt(var) + eps);
  for (double& a : adv) a = (a - mean) * inv;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

ActorLoss ppo_actor_loss(std::span<const double> new_log_prob, std::span<const double> old_log_prob,
                         std::span<const double> advantages, std::span<const double> entropy,
                         double clip, double entropy_coeff) {
  const std::size_t n = new_log_prob.size();
  if (old_log_prob.size() != n || advantages.size() != n || entropy.size() != n)
    throw std::invalid_argument("ppo_actor_loss: size mismatch");
  ActorLoss out;
  out.d_log_prob.assign(n, 0.0);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double surr = 0.0, ent = 0.0;
  int clipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::exp(new_log_prob[i] - old_log_prob[i]);
    const double a = advantages[i];
    const double unclipped = ratio * a;
    const double value = clipped_surrogate(ratio, a, clip);
    surr += value;
    ent += entropy[i];
    // The gradient flows only through the unclipped branch when it is the
    // one selected by the min.
    if (unclipped <= value)
      out.d_log_prob[i] = -unclipped * inv_n;
    else
      ++clipped;
  }
  out.loss = -surr * inv_n - entropy_coeff * ent * inv_n;
  out.d_entropy = -entropy_coeff * inv_n;
  out.clip_fraction = clipped * inv_n;
  return out;
}

CriticLoss ppo_critic_loss(std::span<const double> values, std::span<const double> returns) {
  const std::size_t n = values.size();
  if (returns.size() != n) throw std::invalid_argument("ppo_critic_loss: size mismatch");
  CriticLoss out;
  out.d_value.assign(n, 0.0);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double err = values[i] - returns[i];
    out.loss += err * err * inv_n;
    out.d_value[i] = 2.0 * err * inv_n;
  }
  return out;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("Adam::step: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

double clip_grad_norm(std::initializer_list<std::span<double>> grads, double max_norm) {
  double sq = 0.0;
  for (auto g : grads)
    for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto g : grads)
      for (double& v : g) v *= scale;
  }
  return norm;
}

}  // namespace auvsim::rl
