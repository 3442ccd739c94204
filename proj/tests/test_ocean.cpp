#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "auvsim/ocean.hpp"

using namespace auvsim;
using namespace auvsim::ocean;

namespace {

Vortex unit_vortex() {
  Vortex v;
  v.center = {0.0, 0.0};
  v.core_radius = 1.0;
  v.circulation = 1.0;
  v.strength = 1.0;
  v.vertical_factor = 0.05;
  v.viscosity = 0.25;
  return v;
}

}  // namespace

TEST_SUITE("ocean") {
  TEST_CASE("horizontal component") {
    const Vortex v = unit_vortex();
    const Vec2 at_center = vortex_horizontal(v, v.center);
    CHECK(at_center.x == 0.0);
    CHECK(at_center.y == 0.0);
    // Printed formula evaluated by hand: (0, -(1 - e^-1) / (2 pi)).
    const Vec2 h = vortex_horizontal(v, {1.0, 0.0});
    CHECK(h.x == 0.0);
    CHECK(h.y == doctest::Approx(-(1.0 - std::exp(-1.0)) / (2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(h.y == doctest::Approx(-0.1006).epsilon(1e-3));
    // Far field decays like the ideal vortex.
    const double d = 200.0;
    CHECK(vortex_horizontal(v, {d, 0.0}).norm() ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi * d)).epsilon(1e-12));
  }

  TEST_CASE("vertical component") {
    Vortex v = unit_vortex();
    v.core_radius = 4.0;
    const double peak = v.vertical_factor * v.circulation / (2.0 * std::numbers::pi * 4.0);
    CHECK(vortex_vertical(v, v.center) == doctest::Approx(peak).epsilon(1e-15));
    const double r = std::sqrt(2.0 * 4.0);
    CHECK(vortex_vertical(v, {r, 0.0}) == doctest::Approx(peak * std::exp(-1.0)).epsilon(1e-14));
    v.vertical_factor = 0.0;
    CHECK(vortex_vertical(v, {1.0, 2.0}) == 0.0);
  }

  TEST_CASE("superposition") {
    CurrentField empty;
    empty.background = {0.1, 0.05, 0.0};
    CHECK(current_at(empty, {3.0, 4.0, -5.0}) == empty.background);

    CurrentField one, two;
    one.background = two.background = {};
    one.max_speed = two.max_speed = 0.0;
    const Vortex v = unit_vortex();
    one.vortices = {v};
    two.vortices = {v, v};
    const Vec3 p{0.7, -0.3, -1.0};
    const Vec3 a = current_at(one, p), b = current_at(two, p);
    CHECK(b.x == doctest::Approx(2.0 * a.x).epsilon(1e-15));
    CHECK(b.y == doctest::Approx(2.0 * a.y).epsilon(1e-15));
    CHECK(b.z == doctest::Approx(2.0 * a.z).epsilon(1e-15));

    std::mt19937_64 rng(4);
    FieldConfig cfg;
    cfg.vortex_count = 5;
    CurrentField f = random_field(cfg, Box{}, rng);
    f.max_speed = 0.0;
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 100; ++i) {
      const Vec3 q{u(rng), u(rng), -10.0};
      Vec3 sum = f.background;
      for (const auto& vx : f.vortices) {
        CurrentField single;
        single.background = {};
        single.max_speed = 0.0;
        single.vortices = {vx};
        sum += current_at(single, q);
      }
      const Vec3 c = current_at(f, q);
      CHECK(std::abs(c.x - sum.x) < 1e-12);
      CHECK(std::abs(c.y - sum.y) < 1e-12);
      CHECK(std::abs(c.z - sum.z) < 1e-12);
    }
  }

  TEST_CASE("far-field bound") {
    CurrentField f;
    f.max_speed = 0.0;
    Vortex a = unit_vortex(), b = unit_vortex();
    a.circulation = 10.0;
    b.circulation = 5.0;
    b.center = {5.0, 0.0};
    a.vertical_factor = b.vertical_factor = 0.0;
    f.vortices = {a, b};
    const Vec3 p{0.0, 80.0, 0.0};
    const double dmin = 80.0;
    CHECK((current_at(f, p) - f.background).norm() < 15.0 / (2.0 * std::numbers::pi * dmin));
  }

  TEST_CASE("magnitude clamp") {
    CurrentField f;
    f.background = {3.0, 4.0, 0.0};
    f.max_speed = 1.5;
    CHECK(current_at(f, {}).norm() == doctest::Approx(1.5).epsilon(1e-14));
    f.max_speed = 0.0;
    CHECK(current_at(f, {}).norm() == doctest::Approx(5.0));
  }

  TEST_CASE("continuity along a line through a core") {
    CurrentField f;
    f.background = {};
    f.max_speed = 0.0;
    f.vortices = {unit_vortex()};
    // |grad| of the horizontal field is bounded by delta / (2 pi l^2) near the core.
    const double spacing = 1e-3;
    const double bound = 10.0 * spacing * (1.0 / (2.0 * std::numbers::pi));
    Vec3 prev = current_at(f, {-2.0, -2.0, 0.0});
    for (int i = 1; i <= 4000; ++i) {
      const double s = -2.0 + i * spacing;
      const Vec3 c = current_at(f, {s, s, 0.0});
      CHECK((c - prev).norm() < bound * std::sqrt(2.0));
      prev = c;
    }
  }

  TEST_CASE("advance field") {
    CurrentField f;
    Vortex v = unit_vortex();
    f.vortices = {v};
    f.background = {1.0, 0.0, 0.0};
    const CurrentField g = advance_field(f, 1.0);
    CHECK(g.vortices.size() == 1);
    CHECK(g.vortices[0].core_radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(g.vortices[0].circulation == v.circulation);
    CHECK(g.vortices[0].peak_vorticity() < v.peak_vorticity());
    CHECK(g.time == 1.0);

    v.viscosity = 0.0;
    f.vortices = {v, v};
    const CurrentField h = advance_field(f, 2.0);
    for (const auto& w : h.vortices) {
      CHECK(w.center.x == 2.0);
      CHECK(w.center.y == 0.0);
      CHECK(w.core_radius == 1.0);
    }
    f.background = {};
    const CurrentField still = advance_field(f, 2.0);
    CHECK(still.vortices[0].center == v.center);
    CHECK(still.vortices[0].core_radius == v.core_radius);
    CHECK_THROWS_AS(advance_field(f, 0.0), std::domain_error);
  }

  TEST_CASE("core radius grows monotonically with viscosity") {
    CurrentField f;
    f.vortices = {unit_vortex()};
    double l = f.vortices[0].core_radius;
    for (int i = 0; i < 50; ++i) {
      f = advance_field(f, 2.0);
      CHECK(f.vortices[0].core_radius > l);
      l = f.vortices[0].core_radius;
    }
  }

  TEST_CASE("relative velocity") {
    CHECK(relative_velocity({1, 2, 3}, {}) == Vec3{1, 2, 3});
    CHECK(relative_velocity({1, 2, 3}, {1, 2, 3}) == Vec3{});
    CHECK(relative_velocity({1, 0, 0}, {0, 1, 0}) == Vec3{1, -1, 0});
  }

  TEST_CASE("random field") {
    std::mt19937_64 a(1), b(1);
    FieldConfig cfg;
    const CurrentField x = random_field(cfg, Box{}, a), y = random_field(cfg, Box{}, b);
    REQUIRE(x.vortices.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(x.vortices[i].center == y.vortices[i].center);
      CHECK(x.vortices[i].core_radius >= 20.0);
      CHECK(x.vortices[i].core_radius <= 40.0);
      CHECK(x.vortices[i].circulation >= 5.0);
      CHECK(x.vortices[i].circulation <= 20.0);
    }
    cfg.vortex_count = -1;
    CHECK_THROWS_AS(random_field(cfg, Box{}, a), std::invalid_argument);
  }
}
