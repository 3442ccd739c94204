#include "auvsim/ocean.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace auvsim::ocean {

double Vortex::peak_vorticity() const {
  return strength / (std::numbers::pi * core_radius * core_radius);
}

Vec2 vortex_horizontal(const Vortex& v, const Vec2& r) {
  const Vec2 d = r - v.center;
  const double r2 = d.squared_norm();
  if (r2 == 0.0) return {0.0, 0.0};
  // (1 - e^{-u}) / r^2 with u = r^2 / l^2; -expm1 keeps it exact near the core.
  const double shape = -std::expm1(-r2 / (v.core_radius * v.core_radius)) / r2;
  const double k = -v.circulation / (2.0 * std::numbers::pi) * shape;
  return {k * d.y, k * d.x};
}

double vortex_vertical(const Vortex& v, const Vec2& r) {
  const double r2 = (r - v.center).squared_norm();
  const double l = v.core_radius;
  return v.vertical_factor * v.circulation / (2.0 * std::numbers::pi * l) *
         std::exp(-r2 / (2.0 * l));
}

Vec3 current_at_unclamped(const CurrentField& field, const Vec3& r) {
  Vec3 total = field.background;
  const Vec2 p = r.xy();
  for (const auto& v : field.vortices) {
    const Vec2 h = vortex_horizontal(v, p);
    total += Vec3{h.x, h.y, vortex_vertical(v, p)};
  }
  return total;
}

Vec3 current_at(const CurrentField& field, const Vec3& r) {
  const Vec3 c = current_at_unclamped(field, r);
  if (field.max_speed > 0.0) {
    const double speed = c.norm();
    if (speed > field.max_speed) return c * (field.max_speed / speed);
  }
  return c;
}

CurrentField advance_field(const CurrentField& field, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("advance_field: dt must be > 0");
  CurrentField next = field;
  const Vec2 shift = field.background.xy() * dt;
  for (auto& v : next.vortices) {
    v.center = v.center + shift;
    v.core_radius = std::sqrt(v.core_radius * v.core_radius + 4.0 * v.viscosity * dt);
  }
  next.time = field.time + dt;
  return next;
}

Vec3 relative_velocity(const Vec3& thrust, const Vec3& current) { return thrust - current; }

CurrentField random_field(const FieldConfig& cfg, const Box& arena, std::mt19937_64& rng) {
  if (cfg.vortex_count < 0) throw std::invalid_argument("ocean.vortex_count must be >= 0");
  std::uniform_real_distribution<double> ux(arena.lo.x, arena.hi.x);
  std::uniform_real_distribution<double> uy(arena.lo.y, arena.hi.y);
  std::uniform_real_distribution<double> ul(cfg.core_radius_min, cfg.core_radius_max);
  std::uniform_real_distribution<double> ud(cfg.circulation_min, cfg.circulation_max);
  CurrentField field;
  field.background = cfg.background;
  field.max_speed = cfg.max_speed;
  for (int i = 0; i < cfg.vortex_count; ++i) {
    Vortex v;
    v.center = {ux(rng), uy(rng)};
    v.core_radius = ul(rng);
    v.circulation = ud(rng);
    v.strength = v.circulation;
    v.vertical_factor = cfg.vertical_factor;
    v.viscosity = cfg.viscosity;
    field.vortices.push_back(v);
  }
  return field;
}

}  // namespace auvsim::ocean
