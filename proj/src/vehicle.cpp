#include "auvsim/vehicle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace auvsim::vehicle {

void EnergyParams::validate() const {
  auto require = [](bool ok, const char* key) {
    if (!ok) throw std::invalid_argument(std::string("energy.") + key + " out of range");
  };
  require(weight > 0.0, "weight_G");
  require(water_density > 0.0, "water_density");
  require(cross_section > 0.0, "cross_section_A");
  require(drag_coeff > 0.0, "drag_Cd");
  require(detect_coeff > 0.0, "detect_coeff");
  require(acoustic_efficiency > 0.0 && acoustic_efficiency <= 1.0, "acoustic_efficiency");
  require(slot_dt > 0.0, "slot_dt");
}

Vec3 integrate_position(const Vec3& r, const Vec3& velocity, double dt, const Box& arena) {
  return arena.clamp(r + velocity * dt);
}

PropulsionEnergy propulsion_energy(const Vec3& thrust, const Vec3& relative,
                                   const EnergyParams& p) {
  const double g = p.weight;
  const double dt = p.slot_dt;
  const double rho_a = p.water_density * p.cross_section;
  const double vh2 = thrust.x * thrust.x + thrust.y * thrust.y;

  PropulsionEnergy e;
  e.horizontal = g * g * dt / (std::numbers::sqrt2 * rho_a) /
                 std::sqrt(vh2 + vh2 * vh2 + g * g / (rho_a * rho_a));
  const double vertical = p.charge_ascent ? std::abs(thrust.z) : std::max(-thrust.z, 0.0);
  e.descent = g * vertical * dt;
  const double vr = relative.norm();
  e.drag = 0.5 * rho_a * p.drag_coeff * dt * vr * vr * vr;
  return e;
}

MissionEnergy mission_energy(double detection_radius, double power_w, const EnergyParams& p,
                             double upload_bits, double upload_rate_bps) {
  MissionEnergy e;
  e.detection = p.detect_coeff * std::numbers::pi * detection_radius * detection_radius;
  if (upload_bits > 0.0) {
    if (!(upload_rate_bps > 0.0))
      throw std::runtime_error("mission_energy: stalled upload (zero rate with pending payload)");
    e.transmission = power_w / p.acoustic_efficiency * (upload_bits / upload_rate_bps);
  }
  return e;
}

double apply_energy(double energy, std::span<const double> costs) {
  for (double c : costs) {
    if (!(c >= 0.0)) throw std::invalid_argument("apply_energy: costs must be >= 0");
    energy -= c;
  }
  return energy;
}

}  // namespace auvsim::vehicle
