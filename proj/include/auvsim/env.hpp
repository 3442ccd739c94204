#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "auvsim/acoustics.hpp"
#include "auvsim/ocean.hpp"
#include "auvsim/tasking.hpp"
#include "auvsim/vec3.hpp"
#include "auvsim/vehicle.hpp"

namespace auvsim::env {

struct RewardWeights {
  double xi_coverage = 10.0;   // xi_1
  double xi_delay = -0.01;     // xi_2, negative so long tasks are penalised
  double xi_micro = 1.0;       // xi_3
  double phi_covert = 1.0;     // phi_1
  double phi_task = 1.0;       // phi_2
  double phi_target = 1.0;     // phi_3
  double phi_energy = -1.0;    // phi_4, multiplies the (positive) energy deficit
  double task_bonus = 100.0;   // varpi_b
  double progress_gain = 1.5;  // chi_p
  double regress_gain = 1.5;   // chi_r
};

struct TaskConfig {
  double length = 30.0;
  double width = 30.0;
  double instruction_bits = 1e6;
  double sample_bits_per_m2 = 1e3;
  double sonar_beam = 1.0471975511965976;
  double base_radius = 5.0;   // r_b
  double radius_gain = 10.0;  // mu
  double compute_ref = 10.0;  // C
  double compute = 5.0;       // C_m, shared by all AUVs
  int placement_attempts = 200;
};

struct EnvConfig {
  Box arena;
  int num_auvs = 6;
  int macro_steps = 10;
  int micro_steps = 100;
  acoustics::ChannelParams channel;
  vehicle::EnergyParams energy;
  ocean::FieldConfig ocean;
  TaskConfig task;
  double power_min = 0.0;
  double power_max = 2.0;
  double speed_max = 5.0;
  double dv_max = 1.0;
  double epsilon = 0.05;
  double energy_init_min = 10000.0;
  double energy_init_max = 20000.0;
  Vec3 eavesdropper{75.0, 75.0, 5.0};
  Vec3 central{0.0, 0.0, -10.0};
  RewardWeights weights;
  bool drift_displacement = false;
  bool paper_literal_delays = false;

  void validate() const;
};

inline constexpr std::size_t kMacroFeaturesPerAuv = 4;
inline constexpr std::size_t kMicroObservationSize = 11;

// Per AUV, in fixed AUV order: x, y, z, energy.
using MacroState = std::vector<double>;

// d_eve, d_cauv, d_sub, x, y, z, vx, vy, vz, G, energy.
using MicroObservation = std::array<double, kMicroObservationSize>;

struct MicroAction {
  double power = 0.0;
  Vec3 velocity;
};

struct RewardComponents {
  double covert = 0.0;          // r_c, +1 or -1
  double task_sum = 0.0;        // sum_m G_m r_task^m
  double target_sum = 0.0;      // sum_m G_m r_target^m
  double energy_deficit = 0.0;  // r_e = sum_m ReLU(-E_m)
  double total = 0.0;           // R_micro
};

struct MicroStepResult {
  int slot = 0;  // 1-based tau
  double snr = 0.0;
  double kl = 0.0;
  bool covert = true;
  RewardComponents reward;
  std::vector<double> agent_rewards;  // per AUV, zero for unselected
  std::vector<double> task_rewards;
  std::vector<double> target_rewards;
  std::vector<MicroAction> executed;
  std::vector<std::uint8_t> arrived_now;
  bool done = false;
};

struct MacroResult {
  int macro_index = 0;  // 0-based t
  std::vector<std::uint8_t> selection;
  bool repaired = false;
  bool best_effort = false;  // sub-target placement could not avoid overlap
  double coverage = 0.0;
  double task_time = 0.0;
  double efficiency = 0.0;
  double mean_micro_reward = 0.0;
  double macro_reward = 0.0;
  double mean_kl = 0.0;
  double covert_rate = 0.0;
  std::vector<tasking::PhaseDelays> delays;  // per AUV, default for unselected
  std::vector<double> energies;
  std::vector<MicroStepResult> slots;
  bool done = false;
};

// Called once per micro slot with the environment positioned before the
// slot; returns one action per AUV (entries for unselected AUVs ignored).
using MicroController = std::function<std::vector<MicroAction>(const class Environment&)>;

// Repairs an all-zero selection by switching on the most probable AUV
// (index 0 when no probabilities are given). Returns true if repaired.
bool repair_selection(std::vector<std::uint8_t>& selection, std::span<const double> probabilities);

// Projects a raw action onto the feasible set: power clamp, speed clamp to
// speed_max, then |V - V_prev| <= dv_max by radial projection.
MicroAction project_action(const MicroAction& raw, const Vec3& previous_velocity,
                           const EnvConfig& cfg);

class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  MacroState reset(std::uint64_t seed);

  MacroState macro_observe() const;
  MicroObservation micro_observe(std::size_t m) const;

  // Starts macro slot t with selection G (repaired if all zero).
  const std::vector<std::uint8_t>& begin_macro(std::span<const std::uint8_t> selection,
                                               std::span<const double> probabilities = {});
  MicroStepResult micro_step(std::span<const MicroAction> actions);
  MacroResult end_macro();

  MacroResult macro_step(std::span<const std::uint8_t> selection,
                         std::span<const double> probabilities, const MicroController& controller);

  bool done() const { return phase_ == Phase::kDone; }
  bool in_micro() const { return phase_ == Phase::kMicro; }
  int macro_index() const { return macro_index_; }
  int slot() const { return slot_; }
  const EnvConfig& config() const { return cfg_; }
  std::span<const vehicle::AuvState> auvs() const { return auvs_; }
  const std::vector<std::uint8_t>& selection() const { return selection_; }
  const tasking::TaskSpec& current_task() const { return tasks_.at(macro_index_); }
  const std::vector<Vec3>& subtargets() const { return subtargets_; }
  const ocean::CurrentField& field() const { return field_; }
  const tasking::Placement& placement() const { return placement_; }
  std::optional<int> arrival_slot(std::size_t m) const { return arrival_slot_.at(m); }
  double distance_to_subtarget(std::size_t m) const;

 private:
  enum class Phase { kIdle, kMacroReady, kMicro, kDone };

  void require_started(const char* what) const;

  EnvConfig cfg_;
  std::mt19937_64 rng_;
  Phase phase_ = Phase::kIdle;
  std::vector<vehicle::AuvState> auvs_;
  std::vector<tasking::TaskSpec> tasks_;
  ocean::CurrentField field_;
  int macro_index_ = 0;
  int slot_ = 0;

  std::vector<std::uint8_t> selection_;
  bool repaired_ = false;
  tasking::Placement placement_;
  std::vector<Vec3> subtargets_;
  std::vector<double> prev_subtarget_distance_;
  std::vector<double> start_central_distance_;
  std::vector<double> first_slot_rate_;
  std::vector<std::optional<int>> arrival_slot_;
  std::vector<double> upload_rate_;
  std::vector<double> upload_distance_;
  std::vector<double> upload_power_;
  std::vector<MicroStepResult> slots_;
};

}  // namespace auvsim::env
