#pragma once

#include <random>
#include <vector>

#include "auvsim/vec3.hpp"

// Current field built from superposed Lamb-Oseen vortices plus a uniform
// background flow. Horizontal components follow the printed sign
// convention, v = -delta/(2 pi r^2) (1 - exp(-r^2/l^2)) * (dy, dx), which is a
// strain-like pattern rather than a pure rotation. The vertical component is
// a Gaussian bump with covariance diag(l, l).
namespace auvsim::ocean {

struct Vortex {
  Vec2 center;
  double core_radius = 30.0;     // l, m
  double strength = 10.0;        // beta; integral of the vorticity over the plane
  double circulation = 10.0;     // delta, m^2/s
  double vertical_factor = 0.05; // rho
  double viscosity = 1e-3;       // h, m^2/s

  // Peak of the Gaussian vorticity profile beta / (pi l^2).
  double peak_vorticity() const;
};

struct CurrentField {
  std::vector<Vortex> vortices;
  Vec3 background{0.1, 0.05, 0.0};
  double time = 0.0;
  // Magnitude clamp applied by current_at; <= 0 disables it.
  double max_speed = 1.5;
};

struct FieldConfig {
  int vortex_count = 3;
  double core_radius_min = 20.0;
  double core_radius_max = 40.0;
  double circulation_min = 5.0;
  double circulation_max = 20.0;
  double vertical_factor = 0.05;
  double viscosity = 1e-3;
  Vec3 background{0.1, 0.05, 0.0};
  double max_speed = 1.5;
};

Vec2 vortex_horizontal(const Vortex& v, const Vec2& r);
double vortex_vertical(const Vortex& v, const Vec2& r);

// Superposition without the magnitude clamp.
Vec3 current_at_unclamped(const CurrentField& field, const Vec3& r);

/// Total current at r: vortex contributions plus background, clamped to
/// field.max_speed. The field is independent of depth.
Vec3 current_at(const CurrentField& field, const Vec3& r);

/// Closed-form evolution over dt: centers advect with the horizontal
/// background flow and cores spread as l' = sqrt(l^2 + 4 h dt). The
/// circulation beta is unchanged, so peak vorticity decays.
CurrentField advance_field(const CurrentField& field, double dt);

/// V' = V_thrust - V_T.
Vec3 relative_velocity(const Vec3& thrust, const Vec3& current);

// Vortex centers uniform over the horizontal extent of `arena`.
CurrentField random_field(const FieldConfig& cfg, const Box& arena, std::mt19937_64& rng);

}  // namespace auvsim::ocean
