#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace auvsim::rl {

struct AdvantageReturns {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t), with V(s_T) =
// bootstrap; A_t = sum_l (gamma lambda)^l delta_{t+l}, cut at done flags.
// R_t = A_t + V(s_t).
AdvantageReturns gae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap, std::span<const std::uint8_t> dones, double gamma,
                     double lambda);

}  // namespace auvsim::rl
