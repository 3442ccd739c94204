#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "auvsim/vehicle.hpp"

using namespace auvsim;
using namespace auvsim::vehicle;

namespace {

// The horizontal-movement expression written out verbatim.
double horizontal_oracle(double vx, double vy, double g, double rho, double a, double dt) {
  const double v2 = vx * vx + vy * vy;
  const double bracket = v2 + v2 * v2 + g * g / (rho * rho * a * a);
  return g * g * dt / (std::sqrt(2.0) * rho * a) / std::sqrt(bracket);
}

}  // namespace

TEST_SUITE("vehicle") {
  TEST_CASE("position update") {
    const Box arena;
    CHECK(integrate_position({0, 0, -10}, {}, 2.0, arena) == Vec3{0, 0, -10});
    CHECK(integrate_position({0, 0, -10}, {1, 2, 0}, 2.0, arena) == Vec3{2, 4, -10});
    CHECK(integrate_position({99, 0, -1}, {5, 0, 5}, 2.0, arena) == Vec3{100, 0, 0});
  }

  TEST_CASE("hover energy") {
    EnergyParams p;
    const auto e = propulsion_energy({}, {}, p);
    CHECK(e.horizontal == doctest::Approx(p.weight * p.slot_dt / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(std::abs(e.horizontal - 150.0 * 2.0 / std::sqrt(2.0)) < 1e-9);
    CHECK(e.descent == 0.0);
    CHECK(e.drag == 0.0);
  }

  TEST_CASE("horizontal energy cross-check") {
    EnergyParams p;
    p.weight = 100.0;
    const auto e = propulsion_energy({2.0, 0.0, 0.0}, {}, p);
    CHECK(e.horizontal == doctest::Approx(horizontal_oracle(2.0, 0.0, 100, 1025, 0.1, 2.0)).epsilon(1e-14));
    // Frozen from the direct evaluation above.
    CHECK(e.horizontal == doctest::Approx(30.14257244299127).epsilon(1e-12));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
      const double vx = u(rng), vy = u(rng);
      CHECK(propulsion_energy({vx, vy, 0.0}, {}, p).horizontal > 0.0);
    }
  }

  TEST_CASE("descent energy in the z-up frame") {
    EnergyParams p;
    p.weight = 100.0;
    CHECK(propulsion_energy({0, 0, -1.0}, {}, p).descent == doctest::Approx(200.0));
    CHECK(propulsion_energy({0, 0, 1.0}, {}, p).descent == 0.0);
    p.charge_ascent = true;
    CHECK(propulsion_energy({0, 0, 1.0}, {}, p).descent == doctest::Approx(200.0));
  }

  TEST_CASE("drag energy scales cubically") {
    EnergyParams p;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
      const Vec3 v{u(rng), u(rng), u(rng)};
      const double e1 = propulsion_energy({}, v, p).drag;
      const double e2 = propulsion_energy({}, v * 2.0, p).drag;
      CHECK(e2 == doctest::Approx(8.0 * e1).epsilon(1e-12));
    }
    const double one = propulsion_energy({}, {1, 0, 0}, p).drag;
    CHECK(one == doctest::Approx(0.5 * 1025 * 0.1 * 0.8 * 2.0).epsilon(1e-14));
  }

  TEST_CASE("mission energy") {
    EnergyParams p;
    CHECK(mission_energy(0.0, 2.0, p, 0.0, 0.0).detection == 0.0);
    CHECK(mission_energy(2.0, 0.0, p, 0.0, 0.0).detection ==
          doctest::Approx(0.5 * std::numbers::pi * 4.0));
    p.acoustic_efficiency = 1.0;
    const double full = mission_energy(1.0, 2.0, p, 1000.0, 100.0).transmission;
    CHECK(full == doctest::Approx(20.0));
    p.acoustic_efficiency = 0.5;
    CHECK(mission_energy(1.0, 2.0, p, 1000.0, 100.0).transmission == doctest::Approx(2.0 * full));
    CHECK_THROWS_AS(mission_energy(1.0, 2.0, p, 10.0, 0.0), std::runtime_error);
  }

  TEST_CASE("energy ledger") {
    CHECK(apply_energy(100.0, std::vector<double>{}) == 100.0);
    CHECK(apply_energy(100.0, std::vector<double>{60.0, 50.0}) == -10.0);
    CHECK_THROWS_AS(apply_energy(1.0, std::vector<double>{-1.0}), std::invalid_argument);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    double e = 1000.0;
    for (int i = 0; i < 100; ++i) {
      const double next = apply_energy(e, std::vector<double>{u(rng), u(rng)});
      CHECK(next <= e);
      e = next;
    }
  }

  TEST_CASE("parameter validation") {
    EnergyParams p;
    CHECK_NOTHROW(p.validate());
    p.acoustic_efficiency = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.slot_dt = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
}
