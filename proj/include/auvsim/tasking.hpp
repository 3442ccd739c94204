#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "auvsim/vec3.hpp"

namespace auvsim::tasking {

inline constexpr double kSoundSpeed = 1500.0;  // m/s

struct TaskSpec {
  Vec3 center;
  double length = 30.0;
  double width = 30.0;
  double instruction_bits = 1e6;     // D[t]
  double sample_bits_per_m2 = 1e3;   // phi[t]
  double sonar_beam = 1.0471975511965976;  // theta, rad

  double area() const { return length * width; }
  // Lower-left corner of the rectangle in the world frame.
  Vec2 origin() const { return {center.x - 0.5 * length, center.y - 0.5 * width}; }
};

// Sub-target centers in the rectangle frame [0, l] x [0, w], indexed like
// the input radii. `order` is the processing order (non-increasing radius).
struct Placement {
  std::vector<Vec2> centers;
  std::vector<double> radii;
  std::vector<std::size_t> order;
  bool best_effort = false;
};

struct PhaseInputs {
  double instruction_bits = 0.0;
  double distribution_distance_m = 0.0;  // d_{m,cAUV} at the start of the macro slot
  double distribution_rate_bps = 0.0;    // R_{m,cAUV} in the first micro slot
  std::optional<int> arrival_slot;       // 1-based tau_idx
  int micro_budget = 0;
  double slot_dt = 2.0;
  double detection_radius = 0.0;
  double sonar_beam = 1.0471975511965976;
  double sample_bits_per_m2 = 0.0;
  double upload_distance_m = 0.0;
  double upload_rate_bps = 0.0;
  // Use the printed v_s / d propagation term instead of d / v_s.
  bool paper_literal_delays = false;
};

struct PhaseDelays {
  double distribution = 0.0;  // T_d
  double movement = 0.0;      // T_move
  double execution = 0.0;     // T_e
  double upload = 0.0;        // T_up
  bool arrived = false;
  double upload_bits = 0.0;   // D'

  double total() const { return distribution + movement + execution + upload; }
};

struct TaskOutcome {
  double task_time = 0.0;
  double efficiency = 0.0;
};

/// r_m = r_b + mu ln(1 + C_m / C_ref).
double detection_radius(double compute, double base_radius, double mu, double compute_ref);

/// min(1, sum_m G_m pi r_m^2 / (l w)).
double coverage_ratio(std::span<const std::uint8_t> selected, std::span<const double> radii,
                      double length, double width);

/// Greedy placement: radii in non-increasing order, Gaussian candidates
/// around the rectangle center (sd = side / 6) clamped into each radius's
/// feasible box, accepted when clear of every placed disc. After
/// `max_attempts` rejections the best candidate seen is taken and
/// best_effort is set. A radius exceeding min(l, w) / 2 gets the center.
Placement assign_subtargets(std::span<const double> radii, double length, double width,
                            std::mt19937_64& rng, int max_attempts = 200);

/// Delay of each phase for one AUV. Throws std::domain_error for
/// non-positive rates.
PhaseDelays phase_delays(const PhaseInputs& in);

/// T_task = max over the team of the summed delays, eta = zeta / T_task.
/// Throws std::invalid_argument for an empty team.
TaskOutcome task_time_and_efficiency(std::span<const PhaseDelays> team, double coverage);

}  // namespace auvsim::tasking
