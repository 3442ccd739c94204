#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "auvsim/env.hpp"
#include "auvsim/rl/policies.hpp"
#include "auvsim/rl/ppo.hpp"

namespace auvsim {

struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "runs/default";
  bool dump_trajectories = false;
  std::string simd = "auto";  // auto | scalar | avx2
  int episodes = 2000;
  int checkpoint_every = 100;
  int eval_episodes = 20;
  std::string checkpoint;  // checkpoint to load for eval and baselines
  std::string baseline_kind = "random_V";
  bool baseline_random_power = false;
  std::vector<double> sweep_epsilons{1.0, 0.5, 0.1, 0.05, 0.02, 0.01};
  bool sweep_train = true;  // train each epsilon in place before evaluating
};

struct ExperimentConfig {
  env::EnvConfig env;
  rl::PpoConfig ppo;
  rl::NetConfig nets;
  RunConfig run;

  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Every recognised key in echo order.
std::vector<std::string> config_keys();

// Sets one key from its text form. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_setting(const ExperimentConfig& cfg, const std::string& key);

// Parses "key = value" lines; '#' starts a comment. Later lines win.
void apply_text(ExperimentConfig& cfg, const std::string& text, const std::string& source);

// Defaults, then the file (if any), then "key=value" overrides; validated.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides);

// Full resolved config in the file grammar; loading it reproduces `cfg`.
std::string to_text(const ExperimentConfig& cfg);

// FNV-1a over the echo of every key that shapes the trained networks and
// the environment; run.*, train.*, eval.*, baseline.* and sweep.* are left out.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace auvsim
