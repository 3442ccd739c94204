#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <vector>

#include "auvsim/env.hpp"
#include "auvsim/rl/heads.hpp"
#include "auvsim/rl/policies.hpp"
#include "auvsim/rl/ppo.hpp"

namespace auvsim::rl {

enum class MacroMode { kSample, kGreedy, kRandomSubset };
enum class MicroMode { kSample, kGreedy, kRandomVelocity };

struct RolloutOptions {
  MacroMode macro = MacroMode::kSample;
  MicroMode micro = MicroMode::kSample;
  bool random_power = false;  // with kRandomVelocity, draw power uniformly too
  bool record_transitions = true;
  bool record_trajectories = false;
};

struct MicroTransition {
  std::vector<double> obs;        // scaled local features
  std::vector<double> critic_in;  // scaled global features
  std::array<double, kMicroActionDim> u{};
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;  // scaled by ppo.reward_scale
  std::uint8_t done = 0;
  double advantage = 0.0;
  double ret = 0.0;
};

// One selected AUV over one micro episode. It ends on the time limit, so the
// last step bootstraps from the critic rather than terminating.
struct MicroSegment {
  std::size_t auv = 0;
  std::vector<MicroTransition> steps;
  double bootstrap = 0.0;
};

struct MacroTransition {
  std::vector<double> state;
  std::vector<double> critic_in;
  std::vector<std::uint8_t> selection;  // as sampled, before any repair
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  std::uint8_t done = 0;
  double advantage = 0.0;
  double ret = 0.0;
};

struct TrajectoryRecord {
  int episode = 0;
  int t = 0;
  int tau = 0;
  std::size_t auv = 0;
  Vec3 position;
  Vec3 velocity;
  double power = 0.0;
  double energy = 0.0;
  double d_sub = 0.0;
  double snr = 0.0;
  double kl = 0.0;
  bool covert = true;
  bool arrived = false;
  double reward = 0.0;
};

struct EpisodeMetrics {
  int episode = 0;
  double macro_reward = 0.0;  // sum over macro steps
  double micro_reward = 0.0;  // mean system micro reward per slot
  double zeta = 0.0;          // means over macro steps
  double eta = 0.0;
  double t_task = 0.0;
  double mean_kl = 0.0;       // mean over all slots
  double covert_rate = 0.0;   // fraction of slots meeting the KL bound
  double mean_energy = 0.0;   // mean AUV energy at episode end
  int repairs = 0;
};

struct EpisodeRollout {
  EpisodeMetrics metrics;
  std::vector<env::MacroResult> macros;  // slot lists dropped
  std::vector<MicroSegment> micro;
  std::vector<MacroTransition> macro;
  std::vector<TrajectoryRecord> trajectories;
};

// splitmix64 of the combined inputs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Runs one full episode with read-only policies. Advantages are filled in
// when transitions are recorded.
EpisodeRollout run_episode(const PolicySet& policies, const env::EnvConfig& cfg,
                           const PpoConfig& ppo, int episode, std::uint64_t env_seed,
                           std::uint64_t action_seed, const RolloutOptions& opts);

struct TrainerConfig {
  env::EnvConfig env;
  PpoConfig ppo;
  NetConfig nets;
  int episodes = 2000;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct UpdateLog {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
};

class Trainer {
 public:
  explicit Trainer(TrainerConfig cfg);

  using EpisodeCallback = std::function<void(const EpisodeRollout&)>;

  // Collects episodes in rounds of `workers` parallel rollouts against a
  // frozen parameter snapshot, then merges them in episode order.
  void train(const EpisodeCallback& on_episode = {});
  // Adds a finished rollout to the buffers and runs any updates now due.
  void absorb(EpisodeRollout& rollout);

  PolicySet& policies() { return policies_; }
  const PolicySet& policies() const { return policies_; }
  const TrainerConfig& config() const { return cfg_; }

  int episodes_done() const { return episodes_done_; }
  long micro_updates() const { return micro_updates_; }
  long macro_updates() const { return macro_updates_; }
  long micro_transitions() const { return micro_transitions_; }
  long macro_transitions() const { return macro_transitions_; }
  std::size_t micro_buffer_size(std::size_t k) const { return micro_buffers_.at(k).size(); }
  std::size_t macro_buffer_size() const { return macro_buffer_.size(); }
  const UpdateLog& last_micro_update() const { return micro_log_; }
  const UpdateLog& last_macro_update() const { return macro_log_; }

 private:
  std::size_t buffer_index(std::size_t auv) const;
  void update_micro(std::size_t k);
  void update_macro();

  TrainerConfig cfg_;
  PolicySet policies_;
  std::mt19937_64 rng_;
  std::vector<Adam> actor_adam_, log_std_adam_, critic_adam_;
  Adam macro_actor_adam_, macro_critic_adam_;
  std::vector<std::deque<MicroTransition>> micro_buffers_;
  // Buffer k trains these nets.
  std::vector<std::size_t> buffer_auv_;
  std::deque<MacroTransition> macro_buffer_;
  int episodes_done_ = 0;
  long micro_updates_ = 0, macro_updates_ = 0;
  long micro_transitions_ = 0, macro_transitions_ = 0;
  UpdateLog micro_log_, macro_log_;
};

}  // namespace auvsim::rl
