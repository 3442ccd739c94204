#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "auvsim/config.hpp"
#include "auvsim/rl/trainer.hpp"

namespace auvsim {

// Column order of metrics.csv, one row per training episode.
inline constexpr const char* kMetricsHeader =
    "episode,macro_reward,micro_reward,zeta,eta,t_task,mean_kl,covert_rate,mean_energy,workers";
// Column order of macro_metrics.csv, one row per macro step.
inline constexpr const char* kMacroMetricsHeader =
    "episode,t,selected,repaired,best_effort,zeta,t_task,eta,macro_reward,mean_micro_reward,mean_kl,"
    "covert_rate";

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Shared by eval and both baselines.
struct Summary {
  std::string mode;
  int episodes = 0;
  MeanStd zeta, eta, t_task, kl, covert_rate, micro_reward, macro_reward;
};

Summary summarize(const std::string& mode, const std::vector<rl::EpisodeMetrics>& episodes);
std::string summary_header();
std::string summary_row(const Summary& s);

std::string metrics_row(const rl::EpisodeMetrics& m, int workers);

// Applies run.simd to the kernel dispatcher. Throws if avx2 is requested on
// a machine without it.
void apply_simd(const RunConfig& run);

struct TrainResult {
  std::vector<rl::EpisodeMetrics> episodes;
  std::uint64_t checksum = 0;
  long micro_updates = 0;
  long macro_updates = 0;
  std::filesystem::path final_checkpoint;
};

// Writes metrics.csv, macro_metrics.csv, checkpoints/, resolved_config.txt
// and, when enabled, trajectories.jsonl into run.out_dir.
TrainResult cmd_train(const ExperimentConfig& cfg);

// Deterministic rollouts of the checkpoint in eval.checkpoint (freshly
// initialised policies when empty). Writes summary.csv and eval_episodes.csv.
Summary cmd_eval(const ExperimentConfig& cfg);

// kind is random_G or random_V.
Summary cmd_baseline(const ExperimentConfig& cfg, const std::string& kind);

struct SweepRow {
  double epsilon = 0.0;
  Summary summary;
};

// One row per epsilon in sweep.epsilons; writes sweep.csv.
std::vector<SweepRow> cmd_sweep_epsilon(const ExperimentConfig& cfg);

}  // namespace auvsim
