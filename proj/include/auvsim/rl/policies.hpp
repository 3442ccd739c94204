#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "auvsim/env.hpp"
#include "auvsim/rl/dense_net.hpp"
#include "auvsim/rl/heads.hpp"

namespace auvsim::rl {

struct NetConfig {
  std::size_t actor_hidden = 384;
  std::size_t critic_hidden = 512;
  std::size_t macro_hidden = 256;
  int hidden_layers = 2;
  double init_log_std = -1.6;  // ~1 m/s velocity noise per axis, the dv_max scale
  double hidden_gain = 1.4142135623730951;
  double policy_output_gain = 0.01;
  double value_output_gain = 1.0;
  bool share_actor = true;   // one actor for all AUVs
  bool share_critic = true;  // one centralized micro critic for all AUVs

  void validate() const;
};

// Fixed scales applied to raw features before they reach a network.
inline constexpr double kDistanceScale = 100.0;
inline constexpr double kEnergyScale = 1e4;
inline constexpr double kSpeedScale = 5.0;

// Feature widths. The micro actor sees only the 11 local features.
inline constexpr std::size_t kMicroActorInput = env::kMicroObservationSize;
inline constexpr std::size_t kCriticFeaturesPerAuv = 10;
std::size_t micro_critic_input(std::size_t num_auvs);
std::size_t macro_actor_input(std::size_t num_auvs);
std::size_t macro_critic_input(std::size_t num_auvs);

void local_features(const env::MicroObservation& obs, std::span<double> out);
// Global state (per AUV: position, velocity, energy, G, d_sub, d_eve; then
// task centre, length, width, micro progress) followed by the local
// features of AUV m, so the shared critic scores each AUV separately.
void micro_critic_features(const env::Environment& e, std::size_t m, std::span<double> out);
void macro_actor_features(const env::MacroState& s, std::span<double> out);
// Macro state plus the task centre and macro progress.
void macro_critic_features(const env::Environment& e, std::span<double> out);

struct GaussianActor {
  DenseNet net;
  std::vector<double> log_std;
};

class PolicySet {
 public:
  PolicySet() = default;
  PolicySet(const NetConfig& cfg, std::size_t num_auvs, std::mt19937_64& rng);

  std::size_t num_auvs() const { return num_auvs_; }
  const NetConfig& config() const { return cfg_; }

  std::size_t actor_index(std::size_t m) const { return cfg_.share_actor ? 0 : m; }
  std::size_t critic_index(std::size_t m) const { return cfg_.share_critic ? 0 : m; }

  std::vector<GaussianActor> micro_actors;
  std::vector<DenseNet> micro_critics;
  DenseNet macro_actor;
  DenseNet macro_critic;

  std::size_t parameter_count() const;
  // FNV-1a over the raw bytes of every parameter, in a fixed order.
  std::uint64_t checksum() const;

 private:
  NetConfig cfg_;
  std::size_t num_auvs_ = 0;
};

}  // namespace auvsim::rl
