#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "auvsim/config.hpp"
#include "auvsim/covertness.hpp"

using namespace auvsim;

namespace {

std::string error_key(const std::vector<std::string>& overrides) {
  try {
    load_config(std::nullopt, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults follow the parameter tables") {
    const ExperimentConfig c = load_config(std::nullopt, {});
    CHECK(c.env.num_auvs == 6);
    CHECK(c.env.macro_steps == 10);
    CHECK(c.env.micro_steps == 100);
    CHECK(c.env.epsilon == 0.05);
    CHECK(c.env.task.length == 30.0);
    CHECK(c.env.task.base_radius == 5.0);
    CHECK(c.env.task.compute == 5.0);
    CHECK(c.env.task.compute_ref == 10.0);
    CHECK(c.env.task.radius_gain == 10.0);
    CHECK(c.env.energy.acoustic_efficiency == 0.5);
    CHECK(c.env.energy_init_min == 10000.0);
    CHECK(c.env.energy_init_max == 20000.0);
    CHECK(c.env.weights.progress_gain == 1.5);
    CHECK(c.env.eavesdropper == Vec3{75.0, 75.0, 5.0});
    CHECK(c.ppo.gamma == 0.99);
    CHECK(c.ppo.lambda == 0.95);
    CHECK(c.ppo.clip == 0.2);
    CHECK(c.ppo.epochs == 8);
    CHECK(c.ppo.micro_update == 2048);
    CHECK(c.ppo.macro_update == 32);
    CHECK(c.ppo.micro_minibatch == 512);
    CHECK(c.ppo.macro_minibatch == 16);
    CHECK(c.ppo.actor_lr == 3e-5);
    CHECK(c.ppo.critic_lr == 5e-5);
    CHECK(c.ppo.entropy_coeff == 0.01);
    CHECK(c.nets.actor_hidden == 384);
    CHECK(c.nets.critic_hidden == 512);
    CHECK(c.nets.macro_hidden == 256);
    CHECK(c.run.episodes == 2000);
    CHECK(c.run.checkpoint_every == 100);
  }

  TEST_CASE("overrides") {
    const ExperimentConfig c = load_config(std::nullopt, {"epsilon=0.01", "env.num_auvs = 3"});
    CHECK(c.env.epsilon == 0.01);
    CHECK(covertness::covert_limit(c.env.epsilon) == doctest::Approx(2e-4));
    CHECK(c.env.num_auvs == 3);
    CHECK(get_setting(c, "epsilon") == "0.01");
  }

  TEST_CASE("errors name the key") {
    CHECK(error_key({"epsilonn=0.1"}) == "epsilonn");
    CHECK(error_key({"env.num_auvs=abc"}) == "env.num_auvs");
    CHECK(error_key({"env.num_auvs=0"}) == "env.num_auvs");
    CHECK(error_key({"epsilon=2"}) == "epsilon");
    CHECK(error_key({"ppo.gamma=1.5"}) == "ppo.gamma");
    CHECK(error_key({"net.actor_hidden=0"}) == "net.actor_hidden");
    CHECK(error_key({"run.simd=neon"}) == "run.simd");
    CHECK(error_key({"novalue"}) != "");
    CHECK(error_key({"fidelity.thorp_variant=cubic"}) == "fidelity.thorp_variant");
    CHECK(error_key({"run.dump_trajectories=maybe"}) == "run.dump_trajectories");
  }

  TEST_CASE("file then overrides, later lines win") {
    const auto path = std::filesystem::temp_directory_path() / "auvsim_test_cfg.txt";
    {
      std::ofstream f(path);
      f << "# desk run\nenv.num_auvs = 4\nepsilon = 0.1   # loose\n\nenv.num_auvs = 5\n";
    }
    const ExperimentConfig c = load_config(path, {"epsilon=0.2"});
    CHECK(c.env.num_auvs == 5);
    CHECK(c.env.epsilon == 0.2);
    std::filesystem::remove(path);
    CHECK_THROWS(load_config(path, {}));
  }

  TEST_CASE("echo round trips") {
    ExperimentConfig c = load_config(std::nullopt, {"epsilon=0.0123456789012345", "channel.noise_override=none",
                                                    "sweep.epsilons=1,0.1,0.02", "ocean.background_x=-0.3"});
    const std::string text = to_text(c);
    ExperimentConfig d;
    apply_text(d, text, "echo");
    d.validate();
    CHECK(to_text(d) == text);
    CHECK(config_hash(c) == config_hash(d));
    CHECK(d.run.sweep_epsilons == std::vector<double>{1.0, 0.1, 0.02});
    for (const auto& k : config_keys()) CHECK(get_setting(c, k) == get_setting(d, k));
  }

  TEST_CASE("key registry") {
    const auto keys = config_keys();
    const std::set<std::string> unique(keys.begin(), keys.end());
    CHECK(unique.size() == keys.size());
    for (const char* k : {"env.num_auvs", "epsilon", "channel.carrier_f", "fidelity.thorp_variant",
                          "fidelity.paper_literal_delays", "fidelity.drift_displacement", "ppo.clip",
                          "run.seed", "run.workers", "run.out_dir"})
      CHECK(unique.count(k) == 1);
  }

  TEST_CASE("hash ignores run options") {
    const ExperimentConfig a = load_config(std::nullopt, {});
    const ExperimentConfig b = load_config(std::nullopt, {"run.seed=99", "run.out_dir=/tmp/x", "train.episodes=3"});
    const ExperimentConfig c = load_config(std::nullopt, {"env.num_auvs=5"});
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
  }
}
