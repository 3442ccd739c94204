#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auvsim/config.hpp"
#include "auvsim/experiment.hpp"
#include "auvsim/rl/checkpoint.hpp"
#include "auvsim/rl/kernels.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  bool dump = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--workers", f.workers, "parallel rollout workers");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.sets, "override, key=value (repeatable)")->take_all();
  cmd->add_flag("--dump-trajectories", f.dump, "write trajectories.jsonl");
}

auvsim::ExperimentConfig resolve(const CommonFlags& f, std::vector<std::string> extra) {
  std::vector<std::string> overrides = f.sets;
  if (f.seed) overrides.push_back("run.seed=" + std::to_string(*f.seed));
  if (f.workers) overrides.push_back("run.workers=" + std::to_string(*f.workers));
  if (f.out) overrides.push_back("run.out_dir=" + *f.out);
  if (f.dump) overrides.push_back("run.dump_trajectories=true");
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  std::optional<std::filesystem::path> path;
  if (!f.config.empty()) path = f.config;
  return auvsim::load_config(path, overrides);
}

void print_summary(const auvsim::Summary& s) {
  std::printf("%s over %d episodes: zeta %.4f +- %.4f, eta %.6f +- %.6f, T_task %.2f s, KL %.3e, covert %.3f\n",
              s.mode.c_str(), s.episodes, s.zeta.mean, s.zeta.std, s.eta.mean, s.eta.std, s.t_task.mean,
              s.kl.mean, s.covert_rate.mean);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical multi-AUV covert tasking simulator and trainer"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, base_f, sweep_f;
  std::string eval_ckpt, base_ckpt, kind = "random_V", epsilons;
  std::optional<int> episodes, eval_episodes, base_episodes;

  auto* train = app.add_subcommand("train", "run HMAPPO training");
  add_common(train, train_f);
  train->add_option("--episodes", episodes, "training episodes");

  auto* eval = app.add_subcommand("eval", "deterministic rollouts of a checkpoint");
  add_common(eval, eval_f);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file");
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");

  auto* base = app.add_subcommand("baseline", "random_G or random_V baseline");
  add_common(base, base_f);
  base->add_option("--kind", kind, "random_G | random_V")->check(CLI::IsMember({"random_G", "random_V"}));
  base->add_option("--checkpoint", base_ckpt, "checkpoint for the non-random level");
  base->add_option("--episodes", base_episodes, "evaluation episodes");

  auto* sweep = app.add_subcommand("sweep-epsilon", "train and evaluate across covertness levels");
  add_common(sweep, sweep_f);
  sweep->add_option("--epsilons", epsilons, "comma separated list, e.g. 1,0.1,0.02");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      std::vector<std::string> extra;
      if (episodes) extra.push_back("train.episodes=" + std::to_string(*episodes));
      const auto cfg = resolve(train_f, extra);
      const auto r = auvsim::cmd_train(cfg);
      std::printf("trained %zu episodes (%ld micro / %ld macro updates, kernels %s), checksum %016llx\n",
                  r.episodes.size(), r.micro_updates, r.macro_updates,
                  auvsim::rl::kernels::isa_name(auvsim::rl::kernels::active().isa),
                  static_cast<unsigned long long>(r.checksum));
      std::printf("final checkpoint %s\n", r.final_checkpoint.string().c_str());
    } else if (*eval) {
      std::vector<std::string> extra;
      if (!eval_ckpt.empty()) extra.push_back("eval.checkpoint=" + eval_ckpt);
      if (eval_episodes) extra.push_back("eval.episodes=" + std::to_string(*eval_episodes));
      print_summary(auvsim::cmd_eval(resolve(eval_f, extra)));
    } else if (*base) {
      std::vector<std::string> extra{"baseline.kind=" + kind};
      if (!base_ckpt.empty()) extra.push_back("eval.checkpoint=" + base_ckpt);
      if (base_episodes) extra.push_back("eval.episodes=" + std::to_string(*base_episodes));
      const auto cfg = resolve(base_f, extra);
      print_summary(auvsim::cmd_baseline(cfg, cfg.run.baseline_kind));
    } else if (*sweep) {
      std::vector<std::string> extra;
      if (!epsilons.empty()) extra.push_back("sweep.epsilons=" + epsilons);
      const auto rows = auvsim::cmd_sweep_epsilon(resolve(sweep_f, extra));
      std::printf("epsilon,eta_mean,kl_mean\n");
      for (const auto& r : rows) std::printf("%g,%.6g,%.6g\n", r.epsilon, r.summary.eta.mean, r.summary.kl.mean);
    }
  } catch (const auvsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const auvsim::rl::CheckpointMismatch& e) {
    std::cerr << "incompatible checkpoint: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
