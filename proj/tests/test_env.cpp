#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "auvsim/covertness.hpp"
#include "auvsim/env.hpp"

using namespace auvsim;
using namespace auvsim::env;

namespace {

EnvConfig small_config(int m = 3, int macro = 2, int micro = 20) {
  EnvConfig cfg;
  cfg.num_auvs = m;
  cfg.macro_steps = macro;
  cfg.micro_steps = micro;
  return cfg;
}

// Heads for the sub-target at full speed, silent.
std::vector<MicroAction> seek(const Environment& e, double power = 0.0) {
  std::vector<MicroAction> a(e.auvs().size());
  for (std::size_t m = 0; m < a.size(); ++m) {
    const Vec3 d = e.subtargets()[m] - e.auvs()[m].position;
    const double n = d.norm();
    a[m].power = power;
    a[m].velocity = n > 0.0 ? d * (e.config().speed_max / n) : Vec3{};
  }
  return a;
}

std::vector<MicroAction> random_actions(const Environment& e, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-8.0, 8.0), p(-1.0, 3.0);
  std::vector<MicroAction> a(e.auvs().size());
  for (auto& x : a) x = {p(rng), {u(rng), u(rng), u(rng)}};
  return a;
}

}  // namespace

TEST_SUITE("env") {
  TEST_CASE("reset is deterministic and well formed") {
    EnvConfig cfg = small_config(6);
    Environment a(cfg), b(cfg);
    const MacroState s1 = a.reset(42), s2 = b.reset(42);
    CHECK(s1 == s2);
    CHECK(s1.size() == 24);
    CHECK(a.reset(43) != s1);
    a.reset(42);
    for (const auto& auv : a.auvs()) {
      CHECK(auv.energy >= 10000.0);
      CHECK(auv.energy <= 20000.0);
      CHECK(cfg.arena.contains(auv.position));
    }
  }

  TEST_CASE("micro observation layout") {
    Environment e(small_config(3));
    e.reset(1);
    const std::vector<std::uint8_t> sel{1, 0, 1};
    e.begin_macro(sel);
    const MicroObservation o = e.micro_observe(0);
    CHECK(o.size() == 11);
    const auto& auv = e.auvs()[0];
    CHECK(o[0] == distance(auv.position, e.config().eavesdropper));
    CHECK(o[1] == distance(auv.position, e.config().central));
    CHECK(o[2] == distance(auv.position, e.subtargets()[0]));
    CHECK(o[3] == auv.position.x);
    CHECK(o[5] == auv.position.z);
    CHECK(o[9] == 1.0);
    CHECK(o[10] == auv.energy);
    CHECK(e.micro_observe(1)[9] == 0.0);
    for (std::size_t m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k) CHECK(e.micro_observe(m)[k] >= 0.0);

    const auto r = e.micro_step(seek(e));
    const MicroObservation after = e.micro_observe(0);
    CHECK(after[3] == e.auvs()[0].position.x);
    CHECK(after[4] == e.auvs()[0].position.y);
    CHECK(after[5] == e.auvs()[0].position.z);
    // The unselected AUV is parked and untouched.
    CHECK(r.executed[1].power == 0.0);
    CHECK(e.auvs()[1].velocity == Vec3{});
    CHECK(r.agent_rewards[1] == 0.0);
  }

  TEST_CASE("lifecycle errors") {
    Environment e(small_config(2, 1, 3));
    CHECK_THROWS_AS(e.macro_observe(), std::logic_error);
    e.reset(1);
    CHECK_THROWS_AS(e.micro_observe(0), std::logic_error);
    CHECK_THROWS_AS(e.micro_step(std::vector<MicroAction>(2)), std::logic_error);
    CHECK_THROWS_AS(e.end_macro(), std::logic_error);
    const std::vector<std::uint8_t> sel{1, 1};
    e.begin_macro(sel);
    CHECK_THROWS_AS(e.begin_macro(sel), std::logic_error);
    CHECK_THROWS_AS(e.micro_step(std::vector<MicroAction>(1)), std::invalid_argument);
    CHECK_THROWS_AS(e.end_macro(), std::logic_error);
    for (int i = 0; i < 3; ++i) e.micro_step(std::vector<MicroAction>(2));
    CHECK_THROWS_AS(e.micro_step(std::vector<MicroAction>(2)), std::logic_error);
    const auto res = e.end_macro();
    CHECK(res.done);
    CHECK(e.done());
  }

  TEST_CASE("invalid configuration") {
    EnvConfig cfg = small_config();
    cfg.num_auvs = 0;
    CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
    cfg = small_config();
    cfg.power_max = -1.0;
    CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
    cfg = small_config();
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
  }

  TEST_CASE("selection repair") {
    std::vector<std::uint8_t> g{0, 0, 0};
    const std::vector<double> p{0.1, 0.4, 0.3};
    CHECK(repair_selection(g, p));
    CHECK(g == std::vector<std::uint8_t>{0, 1, 0});
    CHECK_FALSE(repair_selection(g, p));
    std::vector<std::uint8_t> h{0, 0};
    CHECK(repair_selection(h, {}));
    CHECK(h == std::vector<std::uint8_t>{1, 0});

    Environment e(small_config(3, 1, 2));
    e.reset(3);
    const std::vector<std::uint8_t> none{0, 0, 0};
    e.begin_macro(none, p);
    CHECK(e.selection() == std::vector<std::uint8_t>{0, 1, 0});
    e.micro_step(std::vector<MicroAction>(3));
    e.micro_step(std::vector<MicroAction>(3));
    CHECK(e.end_macro().repaired);
  }

  TEST_CASE("action projection") {
    EnvConfig cfg = small_config();
    const MicroAction a = project_action({5.0, {3.0, 0.0, 0.0}}, {}, cfg);
    CHECK(a.power == 2.0);
    CHECK(a.velocity.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.velocity.x == doctest::Approx(1.0));
    const MicroAction b = project_action({-1.0, {0.0, 10.0, 0.0}}, {0.0, 4.5, 0.0}, cfg);
    CHECK(b.power == 0.0);
    CHECK(b.velocity.norm() <= cfg.speed_max + 1e-12);
    const MicroAction c = project_action({NAN, {NAN, 0.0, 0.0}}, {0.5, 0.0, 0.0}, cfg);
    CHECK(c.power == cfg.power_min);
    CHECK(c.velocity == Vec3{0.5, 0.0, 0.0});
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    Vec3 prev{};
    for (int i = 0; i < 1000; ++i) {
      const MicroAction x = project_action({u(rng), {u(rng), u(rng), u(rng)}}, prev, cfg);
      CHECK(x.power >= cfg.power_min);
      CHECK(x.power <= cfg.power_max);
      CHECK(x.velocity.norm() <= cfg.speed_max + 1e-9);
      CHECK((x.velocity - prev).norm() <= cfg.dv_max + 1e-9);
      prev = x.velocity;
    }
  }

  TEST_CASE("reward decomposition and covert coherence") {
    EnvConfig cfg = small_config(3, 2, 30);
    cfg.energy_init_min = 50.0;  // drive some energies negative
    cfg.energy_init_max = 3000.0;
    Environment e(cfg);
    e.reset(9);
    std::mt19937_64 rng(10);
    const auto& w = cfg.weights;
    int negative_slots = 0, violated = 0;
    while (!e.done()) {
      e.begin_macro(std::vector<std::uint8_t>{1, 1, 1});
      for (int tau = 0; tau < cfg.micro_steps; ++tau) {
        const auto r = e.micro_step(random_actions(e, rng));
        const auto& c = r.reward;
        CHECK(c.total == doctest::Approx(w.phi_covert * c.covert + w.phi_task * c.task_sum +
                                         w.phi_target * c.target_sum + w.phi_energy * c.energy_deficit)
                             .epsilon(1e-12));
        const auto margin = covertness::covertness_margin(r.snr, cfg.epsilon);
        CHECK(r.covert == margin.satisfied);
        CHECK(r.kl == margin.kl);
        CHECK(c.covert == (margin.satisfied ? 1.0 : -1.0));
        double deficit = 0.0;
        for (const auto& auv : e.auvs()) deficit += auv.energy < 0.0 ? -auv.energy : 0.0;
        CHECK(c.energy_deficit == doctest::Approx(deficit));
        if (deficit > 0.0) ++negative_slots;
        if (!r.covert) ++violated;
      }
      e.end_macro();
    }
    CHECK(negative_slots > 0);
  }

  TEST_CASE("silent team is covert") {
    Environment e(small_config(2, 1, 5));
    e.reset(2);
    e.begin_macro(std::vector<std::uint8_t>{1, 1});
    for (int i = 0; i < 5; ++i) {
      const auto r = e.micro_step(std::vector<MicroAction>(2));
      CHECK(r.kl == 0.0);
      CHECK(r.reward.covert == 1.0);
    }
  }

  TEST_CASE("progress reward") {
    EnvConfig cfg = small_config(1, 1, 5);
    cfg.ocean.vortex_count = 0;
    Environment e(cfg);
    e.reset(4);
    e.begin_macro(std::vector<std::uint8_t>{1});
    const double d0 = e.distance_to_subtarget(0);
    const auto r = e.micro_step(seek(e));
    const double d1 = e.distance_to_subtarget(0);
    REQUIRE(d0 > d1);
    CHECK(r.target_rewards[0] == doctest::Approx(1.5 * (d0 - d1)).epsilon(1e-12));
    // Moving 1 m/s for 2 s straight at the target gains 2 m, worth 3.
    CHECK(r.target_rewards[0] == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("task latch matches the reported arrival slot") {
    EnvConfig cfg = small_config(2, 3, 60);
    cfg.arena = Box{{-40, -40, -40}, {40, 40, 0}};
    Environment e(cfg);
    e.reset(5);
    int arrivals = 0;
    while (!e.done()) {
      e.begin_macro(std::vector<std::uint8_t>{1, 1});
      std::vector<int> fired(2, 0);
      for (int tau = 0; tau < cfg.micro_steps; ++tau) {
        const auto r = e.micro_step(seek(e));
        for (std::size_t m = 0; m < 2; ++m) {
          if (r.task_rewards[m] > 0.0) {
            CHECK(fired[m] == 0);
            fired[m] = r.slot;
            CHECK(r.task_rewards[m] == cfg.weights.task_bonus);
          }
        }
      }
      const auto res = e.end_macro();
      for (std::size_t m = 0; m < 2; ++m) {
        if (fired[m]) {
          ++arrivals;
          CHECK(res.delays[m].arrived);
          CHECK(res.delays[m].movement == doctest::Approx(fired[m] * cfg.energy.slot_dt));
        } else {
          CHECK_FALSE(res.delays[m].arrived);
        }
      }
    }
    CHECK(arrivals > 0);
  }

  TEST_CASE("macro step aggregates") {
    EnvConfig cfg = small_config(6, 10, 3);
    cfg.energy_init_min = cfg.energy_init_max = 1e9;
    Environment e(cfg);
    e.reset(7);
    int steps = 0;
    MacroResult last;
    const auto controller = [](const Environment& env) {
      return std::vector<MicroAction>(env.auvs().size());
    };
    while (!e.done()) {
      last = e.macro_step(std::vector<std::uint8_t>(6, 1), {}, controller);
      ++steps;
      CHECK(last.coverage == 1.0);
      CHECK(last.macro_reward ==
            doctest::Approx(cfg.weights.xi_coverage * last.coverage +
                            cfg.weights.xi_delay * last.task_time +
                            cfg.weights.xi_micro * last.mean_micro_reward));
      CHECK(last.efficiency == doctest::Approx(last.coverage / last.task_time));
      double tmax = 0.0;
      for (const auto& d : last.delays) tmax = std::max(tmax, d.total());
      CHECK(last.task_time == tmax);
      CHECK(last.slots.size() == 3);
    }
    CHECK(steps == 10);
    CHECK(last.done);
  }

  TEST_CASE("energy never increases across a slot") {
    Environment e(small_config(3, 2, 25));
    e.reset(12);
    std::mt19937_64 rng(13);
    while (!e.done()) {
      e.begin_macro(std::vector<std::uint8_t>{1, 0, 1});
      for (int tau = 0; tau < 25; ++tau) {
        std::vector<double> before;
        for (const auto& auv : e.auvs()) before.push_back(auv.energy);
        e.micro_step(random_actions(e, rng));
        for (std::size_t m = 0; m < 3; ++m) CHECK(e.auvs()[m].energy <= before[m]);
      }
      e.end_macro();
    }
  }

  TEST_CASE("trajectories replay identically") {
    EnvConfig cfg = small_config(3, 2, 10);
    auto run = [&]() {
      Environment e(cfg);
      e.reset(21);
      std::mt19937_64 rng(22);
      std::vector<double> trace;
      while (!e.done()) {
        e.begin_macro(std::vector<std::uint8_t>{1, 1, 0});
        for (int tau = 0; tau < cfg.micro_steps; ++tau) {
          const auto r = e.micro_step(random_actions(e, rng));
          trace.push_back(r.reward.total);
          for (const auto& auv : e.auvs()) trace.push_back(auv.position.x + auv.energy);
        }
        trace.push_back(e.end_macro().macro_reward);
      }
      return trace;
    };
    CHECK(run() == run());
  }
}
