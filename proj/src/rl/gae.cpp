#include "auvsim/rl/gae.hpp"

#include <stdexcept>

namespace auvsim::rl {

AdvantageReturns gae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap, std::span<const std::uint8_t> dones, double gamma,
                     double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("gae: rewards, values and dones must have equal length");
  AdvantageReturns out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? values[t + 1] : bootstrap;
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    running = delta + gamma * lambda * live * running;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

}  // namespace auvsim::rl
