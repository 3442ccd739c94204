#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "auvsim/tasking.hpp"

using namespace auvsim;
using namespace auvsim::tasking;

namespace {

// Returns true when every center is in its feasible box and, unless
// best_effort, all discs are disjoint.
bool placement_ok(const Placement& p, double l, double w) {
  const double tol = 1e-12;
  for (std::size_t i = 0; i < p.centers.size(); ++i) {
    const double r = p.radii[i];
    if (r > 0.5 * std::min(l, w)) continue;
    const Vec2 c = p.centers[i];
    if (c.x < r - tol || c.x > l - r + tol || c.y < r - tol || c.y > w - r + tol) return false;
  }
  if (p.best_effort) return true;
  for (std::size_t i = 0; i < p.centers.size(); ++i)
    for (std::size_t j = i + 1; j < p.centers.size(); ++j)
      if ((p.centers[i] - p.centers[j]).norm() < p.radii[i] + p.radii[j] - tol) return false;
  return true;
}

PhaseInputs base_inputs() {
  PhaseInputs in;
  in.instruction_bits = 1e6;
  in.distribution_rate_bps = 1e6;
  in.upload_rate_bps = 1e6;
  in.micro_budget = 30;
  in.slot_dt = 2.0;
  in.detection_radius = 9.054651081081644;
  in.sample_bits_per_m2 = 0.0;
  return in;
}

}  // namespace

TEST_SUITE("tasking") {
  TEST_CASE("detection radius") {
    CHECK(detection_radius(0.0, 5.0, 10.0, 10.0) == 5.0);
    CHECK(detection_radius(5.0, 5.0, 10.0, 10.0) == doctest::Approx(9.054651081081644).epsilon(1e-14));
    CHECK(detection_radius(6.0, 5.0, 10.0, 10.0) > detection_radius(5.0, 5.0, 10.0, 10.0));
    CHECK_THROWS_AS(detection_radius(-1.0, 5.0, 10.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(detection_radius(1.0, 5.0, 10.0, 0.0), std::domain_error);
  }

  TEST_CASE("coverage ratio") {
    const double r = detection_radius(5.0, 5.0, 10.0, 10.0);
    const std::vector<double> radii(4, r);
    CHECK(coverage_ratio(std::vector<std::uint8_t>{0, 0, 0, 0}, radii, 30, 30) == 0.0);
    CHECK(coverage_ratio(std::vector<std::uint8_t>{1, 0, 0, 0}, radii, 30, 30) ==
          doctest::Approx(0.28618759321151394).epsilon(1e-13));
    CHECK(coverage_ratio(std::vector<std::uint8_t>{1, 1, 1, 1}, radii, 30, 30) == 1.0);
    // Three AUVs stay below one.
    CHECK(coverage_ratio(std::vector<std::uint8_t>{1, 1, 1, 0}, radii, 30, 30) ==
          doctest::Approx(3 * 0.28618759321151394).epsilon(1e-13));
    // Adding an AUV never lowers coverage.
    std::vector<std::uint8_t> sel(4, 0);
    double prev = 0.0;
    for (int m = 0; m < 4; ++m) {
      sel[m] = 1;
      const double z = coverage_ratio(sel, radii, 30, 30);
      CHECK(z >= prev);
      CHECK(z <= 1.0);
      prev = z;
    }
    CHECK_THROWS_AS(coverage_ratio(sel, radii, 0, 30), std::domain_error);
  }

  TEST_CASE("placement basics") {
    std::mt19937_64 rng(1);
    const auto one = assign_subtargets(std::vector<double>{5.0}, 30, 30, rng);
    CHECK_FALSE(one.best_effort);
    CHECK(placement_ok(one, 30, 30));
    const auto two = assign_subtargets(std::vector<double>{1.0, 1.0}, 30, 30, rng);
    CHECK_FALSE(two.best_effort);
    CHECK(placement_ok(two, 30, 30));
    const auto big = assign_subtargets(std::vector<double>{20.0}, 30, 30, rng);
    CHECK(big.best_effort);
    CHECK(big.centers[0] == Vec2{15.0, 15.0});
  }

  TEST_CASE("placement processes radii in non-increasing order") {
    std::mt19937_64 rng(2);
    const std::vector<double> radii{1.0, 3.0, 2.0, 3.0, 0.5};
    const auto p = assign_subtargets(radii, 30, 30, rng);
    REQUIRE(p.order.size() == radii.size());
    for (std::size_t k = 1; k < p.order.size(); ++k)
      CHECK(radii[p.order[k - 1]] >= radii[p.order[k]]);
  }

  TEST_CASE("placement property over random instances") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> side(20.0, 60.0);
    std::uniform_int_distribution<int> count(1, 5);
    int failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const double l = side(rng), w = side(rng);
      const int n = count(rng);
      // Total disc area at most 15% of the rectangle: abundant feasibility.
      const double rmax = std::sqrt(0.15 * l * w / (n * std::numbers::pi));
      std::uniform_real_distribution<double> ur(0.2 * rmax, rmax);
      std::vector<double> radii(n);
      for (auto& r : radii) r = ur(rng);
      const auto p = assign_subtargets(radii, l, w, rng, 1000);
      if (p.best_effort || !placement_ok(p, l, w)) ++failures;
    }
    CHECK(failures == 0);
  }

  TEST_CASE("four detection discs cannot fit a 30 m square") {
    std::mt19937_64 rng(4);
    const double r = 9.054651081081644;
    // Largest center separation inside the feasible box, sqrt(2) (30 - 2r).
    CHECK(std::sqrt(2.0) * (30.0 - 2.0 * r) < 2.0 * r);
    const auto p = assign_subtargets(std::vector<double>(4, r), 30, 30, rng);
    CHECK(p.best_effort);
    CHECK(placement_ok(p, 30, 30));
  }

  TEST_CASE("phase delays") {
    PhaseInputs in = base_inputs();
    PhaseDelays d = phase_delays(in);
    CHECK(d.distribution == doctest::Approx(1.0));
    in.distribution_distance_m = 1500.0;
    CHECK(phase_delays(in).distribution == doctest::Approx(2.0));
    CHECK(d.execution == doctest::Approx(0.6939179931855547).epsilon(1e-13));
    CHECK_FALSE(d.arrived);
    CHECK(d.movement == doctest::Approx(60.0));
    in.arrival_slot = 7;
    d = phase_delays(in);
    CHECK(d.arrived);
    CHECK(d.movement == doctest::Approx(14.0));
    in.sample_bits_per_m2 = 1e3;
    in.upload_rate_bps = 500.0;
    in.upload_distance_m = 300.0;
    d = phase_delays(in);
    const double bits = 1e3 * std::numbers::pi * in.detection_radius * in.detection_radius;
    CHECK(d.upload_bits == doctest::Approx(bits));
    CHECK(d.upload == doctest::Approx(bits / 500.0 + 0.2));
    CHECK(d.total() == doctest::Approx(d.distribution + d.movement + d.execution + d.upload));

    in.paper_literal_delays = true;
    CHECK(phase_delays(in).upload == doctest::Approx(bits / 500.0 + 1500.0 / 300.0));

    in.upload_rate_bps = 0.0;
    CHECK_THROWS_AS(phase_delays(in), std::domain_error);
  }

  TEST_CASE("task time and efficiency") {
    PhaseDelays a, b;
    a.distribution = 100.0;
    b.distribution = 120.0;
    const std::vector<PhaseDelays> one{a};
    CHECK(task_time_and_efficiency(one, 0.5).task_time == 100.0);
    const std::vector<PhaseDelays> team{a, b};
    const auto out = task_time_and_efficiency(team, 1.0);
    CHECK(out.task_time == 120.0);
    CHECK(out.efficiency == doctest::Approx(1.0 / 120.0));
    CHECK(out.efficiency == doctest::Approx(0.00833).epsilon(1e-3));
    PhaseDelays c;
    c.distribution = 150.0;
    const std::vector<PhaseDelays> slower{a, c};
    CHECK(task_time_and_efficiency(slower, 1.0).efficiency < out.efficiency);
    CHECK_THROWS_AS(task_time_and_efficiency(std::vector<PhaseDelays>{}, 1.0),
                    std::invalid_argument);
  }
}
