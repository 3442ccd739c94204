#pragma once

#include <span>

#include "auvsim/vec3.hpp"

namespace auvsim::vehicle {

struct AuvState {
  Vec3 position;
  Vec3 velocity;  // thrust velocity commanded in the last executed slot
  double energy = 0.0;
  double detection_radius = 0.0;
  double compute = 0.0;
  bool selected = false;
  double power = 0.0;
};

struct EnergyParams {
  double weight = 150.0;             // G, N
  double water_density = 1025.0;     // rho_l, kg/m^3
  double cross_section = 0.1;        // A, m^2
  double drag_coeff = 0.8;           // C_d
  double detect_coeff = 0.5;         // eps_det, J/m^2
  double acoustic_efficiency = 0.5;  // eta_e in (0, 1]
  double slot_dt = 2.0;              // s
  bool charge_ascent = false;        // charge |v_z| instead of descent only

  void validate() const;
};

struct PropulsionEnergy {
  double horizontal = 0.0;
  double descent = 0.0;
  double drag = 0.0;
  double total() const { return horizontal + descent + drag; }
};

struct MissionEnergy {
  double detection = 0.0;
  double transmission = 0.0;
};

/// r' = r + dt * v, clamped to the arena.
Vec3 integrate_position(const Vec3& r, const Vec3& velocity, double dt, const Box& arena);

/// Per-slot propulsion energy. `thrust` is in the z-up world frame, so the
/// descent rate is -thrust.z. The horizontal term uses the thrust velocity's
/// horizontal components; drag uses the velocity relative to the current.
PropulsionEnergy propulsion_energy(const Vec3& thrust, const Vec3& relative,
                                   const EnergyParams& params);

/// Detection energy eps_det * pi r^2 and upload energy (P / eta_e) * bits / rate.
/// Throws std::runtime_error for a non-positive rate with a non-empty payload.
MissionEnergy mission_energy(double detection_radius, double power_w, const EnergyParams& params,
                             double upload_bits, double upload_rate_bps);

// E - sum(costs); the result may be negative. Costs must be >= 0.
double apply_energy(double energy, std::span<const double> costs);

}  // namespace auvsim::vehicle
