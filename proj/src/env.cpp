#include "auvsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "auvsim/covertness.hpp"

namespace auvsim::env {
namespace {

// Floor on link rates so a silent transmitter yields a huge but finite delay.
constexpr double kMinLinkRateBps = 1.0;

void require(bool ok, const std::string& key, const char* what) {
  if (!ok) throw std::invalid_argument(key + ": " + what);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

void EnvConfig::validate() const {
  require(arena.hi.x > arena.lo.x && arena.hi.y > arena.lo.y && arena.hi.z > arena.lo.z, "arena",
          "empty box");
  require(num_auvs >= 1, "env.num_auvs", "must be >= 1");
  require(macro_steps >= 1, "env.macro_steps", "must be >= 1");
  require(micro_steps >= 1, "env.micro_steps", "must be >= 1");
  channel.validate();
  energy.validate();
  require(task.length > 0.0 && task.width > 0.0, "task.length", "rectangle sides must be > 0");
  require(task.length <= arena.extent().x && task.width <= arena.extent().y, "task.length",
          "rectangle larger than arena");
  require(task.compute >= 0.0 && task.compute_ref > 0.0, "task.compute", "requires C_m >= 0, C > 0");
  require(task.placement_attempts >= 1, "task.placement_attempts", "must be >= 1");
  require(power_min >= 0.0 && power_max > power_min, "auv.power_max", "requires 0 <= P_min < P_max");
  require(speed_max > 0.0, "auv.speed_max", "must be > 0");
  require(dv_max > 0.0, "auv.dv_max", "must be > 0");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon", "must lie in (0, 1]");
  require(energy_init_min <= energy_init_max, "energy.init_min", "must be <= energy.init_max");
}

bool repair_selection(std::vector<std::uint8_t>& selection, std::span<const double> probabilities) {
  if (std::any_of(selection.begin(), selection.end(), [](std::uint8_t g) { return g != 0; }))
    return false;
  std::size_t best = 0;
  if (probabilities.size() == selection.size() && !probabilities.empty())
    best = static_cast<std::size_t>(
        std::distance(probabilities.begin(), std::max_element(probabilities.begin(), probabilities.end())));
  if (!selection.empty()) selection[best] = 1;
  return true;
}

MicroAction project_action(const MicroAction& raw, const Vec3& previous_velocity,
                           const EnvConfig& cfg) {
  MicroAction out;
  out.power = std::clamp(std::isfinite(raw.power) ? raw.power : cfg.power_min, cfg.power_min,
                         cfg.power_max);
  Vec3 v = raw.velocity;
  if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) v = previous_velocity;
  const double speed = v.norm();
  if (speed > cfg.speed_max) v = v * (cfg.speed_max / speed);
  const Vec3 dv = v - previous_velocity;
  const double dv_norm = dv.norm();
  if (dv_norm > cfg.dv_max) v = previous_velocity + dv * (cfg.dv_max / dv_norm);
  out.velocity = v;
  return out;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void Environment::require_started(const char* what) const {
  if (phase_ == Phase::kIdle)
    throw std::logic_error(std::string(what) + ": episode not started (call reset first)");
}

MacroState Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  const std::size_t m_count = static_cast<std::size_t>(cfg_.num_auvs);
  const Box& a = cfg_.arena;
  std::uniform_real_distribution<double> ux(a.lo.x, a.hi.x);
  std::uniform_real_distribution<double> uy(a.lo.y, a.hi.y);
  std::uniform_real_distribution<double> uz(a.lo.z, a.hi.z);
  std::uniform_real_distribution<double> ue(cfg_.energy_init_min, cfg_.energy_init_max);

  const double radius = tasking::detection_radius(cfg_.task.compute, cfg_.task.base_radius,
                                                  cfg_.task.radius_gain, cfg_.task.compute_ref);
  auvs_.assign(m_count, {});
  for (auto& auv : auvs_) {
    auv.position = {ux(rng_), uy(rng_), uz(rng_)};
    auv.energy = ue(rng_);
    auv.compute = cfg_.task.compute;
    auv.detection_radius = radius;
  }
  field_ = ocean::random_field(cfg_.ocean, a, rng_);

  const double hl = 0.5 * cfg_.task.length;
  const double hw = 0.5 * cfg_.task.width;
  std::uniform_real_distribution<double> tx(a.lo.x + hl, a.hi.x - hl);
  std::uniform_real_distribution<double> ty(a.lo.y + hw, a.hi.y - hw);
  tasks_.clear();
  for (int t = 0; t < cfg_.macro_steps; ++t) {
    tasking::TaskSpec task;
    task.center = {tx(rng_), ty(rng_), uz(rng_)};
    task.length = cfg_.task.length;
    task.width = cfg_.task.width;
    task.instruction_bits = cfg_.task.instruction_bits;
    task.sample_bits_per_m2 = cfg_.task.sample_bits_per_m2;
    task.sonar_beam = cfg_.task.sonar_beam;
    tasks_.push_back(task);
  }

  macro_index_ = 0;
  slot_ = 0;
  selection_.assign(m_count, 0);
  subtargets_.assign(m_count, {});
  arrival_slot_.assign(m_count, std::nullopt);
  slots_.clear();
  phase_ = Phase::kMacroReady;
  return macro_observe();
}

MacroState Environment::macro_observe() const {
  require_started("macro_observe");
  MacroState s;
  s.reserve(auvs_.size() * kMacroFeaturesPerAuv);
  for (const auto& auv : auvs_) {
    s.push_back(auv.position.x);
    s.push_back(auv.position.y);
    s.push_back(auv.position.z);
    s.push_back(auv.energy);
  }
  return s;
}

double Environment::distance_to_subtarget(std::size_t m) const {
  if (!selection_.at(m)) return 0.0;
  return distance(auvs_[m].position, subtargets_[m]);
}

MicroObservation Environment::micro_observe(std::size_t m) const {
  if (phase_ != Phase::kMicro) throw std::logic_error("micro_observe: no active micro episode");
  const auto& auv = auvs_.at(m);
  return {distance(auv.position, cfg_.eavesdropper),
          distance(auv.position, cfg_.central),
          distance_to_subtarget(m),
          auv.position.x,
          auv.position.y,
          auv.position.z,
          auv.velocity.x,
          auv.velocity.y,
          auv.velocity.z,
          selection_[m] ? 1.0 : 0.0,
          auv.energy};
}

const std::vector<std::uint8_t>& Environment::begin_macro(std::span<const std::uint8_t> selection,
                                                          std::span<const double> probabilities) {
  if (phase_ != Phase::kMacroReady)
    throw std::logic_error("begin_macro: environment is not awaiting a macro decision");
  const std::size_t n = auvs_.size();
  if (selection.size() != n) throw std::invalid_argument("begin_macro: selection length != M");
  selection_.assign(n, 0);
  for (std::size_t m = 0; m < n; ++m) selection_[m] = selection[m] ? 1 : 0;
  repaired_ = repair_selection(selection_, probabilities);

  const auto& task = tasks_[macro_index_];
  std::vector<std::size_t> team;
  std::vector<double> radii;
  for (std::size_t m = 0; m < n; ++m) {
    auvs_[m].selected = selection_[m] != 0;
    if (selection_[m]) {
      team.push_back(m);
      radii.push_back(auvs_[m].detection_radius);
    } else {
      auvs_[m].velocity = {};
      auvs_[m].power = 0.0;
    }
  }
  const tasking::Placement local =
      tasking::assign_subtargets(radii, task.length, task.width, rng_, cfg_.task.placement_attempts);
  placement_ = local;

  const Vec2 origin = task.origin();
  subtargets_.assign(n, {});
  prev_subtarget_distance_.assign(n, 0.0);
  start_central_distance_.assign(n, 0.0);
  first_slot_rate_.assign(n, kMinLinkRateBps);
  upload_rate_.assign(n, kMinLinkRateBps);
  upload_distance_.assign(n, 0.0);
  upload_power_.assign(n, 0.0);
  arrival_slot_.assign(n, std::nullopt);
  for (std::size_t k = 0; k < team.size(); ++k) {
    const std::size_t m = team[k];
    subtargets_[m] = {origin.x + local.centers[k].x, origin.y + local.centers[k].y, task.center.z};
    prev_subtarget_distance_[m] = distance(auvs_[m].position, subtargets_[m]);
    start_central_distance_[m] = distance(auvs_[m].position, cfg_.central);
  }
  slot_ = 0;
  slots_.clear();
  phase_ = Phase::kMicro;
  return selection_;
}

MicroStepResult Environment::micro_step(std::span<const MicroAction> actions) {
  if (phase_ != Phase::kMicro || slot_ >= cfg_.micro_steps)
    throw std::logic_error("micro_step: no active micro slot");
  const std::size_t n = auvs_.size();
  if (actions.size() != n) throw std::invalid_argument("micro_step: need one action slot per AUV");
  ++slot_;

  MicroStepResult res;
  res.slot = slot_;
  res.agent_rewards.assign(n, 0.0);
  res.task_rewards.assign(n, 0.0);
  res.target_rewards.assign(n, 0.0);
  res.executed.assign(n, {});
  res.arrived_now.assign(n, 0);

  // Link quantities use positions at the start of the slot, when the
  // power decision was made.
  std::vector<double> powers(n, 0.0);
  std::vector<double> eve_distance(n, 1.0);
  for (std::size_t m = 0; m < n; ++m) {
    auto& auv = auvs_[m];
    if (!selection_[m]) continue;
    const MicroAction exec = project_action(actions[m], auv.velocity, cfg_);
    res.executed[m] = exec;
    powers[m] = exec.power;
    auv.power = exec.power;
    eve_distance[m] = distance(auv.position, cfg_.eavesdropper);
    const double rate = std::max(
        kMinLinkRateBps, acoustics::point_to_point_rate(cfg_.channel, exec.power,
                                                       distance(auv.position, cfg_.central)));
    if (slot_ == 1) first_slot_rate_[m] = rate;

    const Vec3 current = ocean::current_at(field_, auv.position);
    const auto prop = vehicle::propulsion_energy(
        exec.velocity, ocean::relative_velocity(exec.velocity, current), cfg_.energy);
    const double cost = prop.total();
    auv.energy = vehicle::apply_energy(auv.energy, {&cost, 1});
    const Vec3 displacement_velocity =
        cfg_.drift_displacement ? exec.velocity + current : exec.velocity;
    auv.position = vehicle::integrate_position(auv.position, displacement_velocity,
                                               cfg_.energy.slot_dt, cfg_.arena);
    auv.velocity = exec.velocity;

    const double d_sub = distance(auv.position, subtargets_[m]);
    if (!arrival_slot_[m] && d_sub <= auv.detection_radius) {
      arrival_slot_[m] = slot_;
      res.arrived_now[m] = 1;
      res.task_rewards[m] = cfg_.weights.task_bonus;
      const double det =
          vehicle::mission_energy(auv.detection_radius, 0.0, cfg_.energy, 0.0, 0.0).detection;
      auv.energy = vehicle::apply_energy(auv.energy, {&det, 1});
    }
    if (!arrival_slot_[m] || res.arrived_now[m]) {
      upload_distance_[m] = distance(auv.position, cfg_.central);
      upload_power_[m] = exec.power;
      upload_rate_[m] = std::max(kMinLinkRateBps, acoustics::point_to_point_rate(
                                                      cfg_.channel, exec.power, upload_distance_[m]));
    }
    const double delta = prev_subtarget_distance_[m] - d_sub;
    if (delta > 0.0)
      res.target_rewards[m] = cfg_.weights.progress_gain * delta;
    else if (delta < 0.0)
      res.target_rewards[m] = -cfg_.weights.regress_gain * (-delta);
    prev_subtarget_distance_[m] = d_sub;
  }

  res.snr = acoustics::eavesdropper_snr(selection_, powers, eve_distance, cfg_.channel);
  const auto margin = covertness::covertness_margin(res.snr, cfg_.epsilon);
  res.kl = margin.kl;
  res.covert = margin.satisfied;

  const auto& w = cfg_.weights;
  RewardComponents& rc = res.reward;
  rc.covert = res.covert ? 1.0 : -1.0;
  for (std::size_t m = 0; m < n; ++m) {
    rc.energy_deficit += relu(-auvs_[m].energy);
    if (!selection_[m]) continue;
    rc.task_sum += res.task_rewards[m];
    rc.target_sum += res.target_rewards[m];
  }
  rc.total = w.phi_covert * rc.covert + w.phi_task * rc.task_sum + w.phi_target * rc.target_sum +
             w.phi_energy * rc.energy_deficit;
  for (std::size_t m = 0; m < n; ++m) {
    if (!selection_[m]) continue;
    res.agent_rewards[m] = w.phi_covert * rc.covert + w.phi_task * res.task_rewards[m] +
                           w.phi_target * res.target_rewards[m] +
                           w.phi_energy * relu(-auvs_[m].energy);
  }

  field_ = ocean::advance_field(field_, cfg_.energy.slot_dt);
  res.done = slot_ == cfg_.micro_steps;
  slots_.push_back(res);
  return res;
}

MacroResult Environment::end_macro() {
  if (phase_ != Phase::kMicro || slot_ != cfg_.micro_steps)
    throw std::logic_error("end_macro: micro episode not finished");
  const std::size_t n = auvs_.size();
  const auto& task = tasks_[macro_index_];
  MacroResult out;
  out.macro_index = macro_index_;
  out.selection = selection_;
  out.repaired = repaired_;
  out.best_effort = placement_.best_effort;
  out.delays.assign(n, {});

  std::vector<double> radii(n);
  std::vector<tasking::PhaseDelays> team;
  for (std::size_t m = 0; m < n; ++m) {
    radii[m] = auvs_[m].detection_radius;
    if (!selection_[m]) continue;
    tasking::PhaseInputs in;
    in.instruction_bits = task.instruction_bits;
    in.distribution_distance_m = start_central_distance_[m];
    in.distribution_rate_bps = first_slot_rate_[m];
    in.arrival_slot = arrival_slot_[m];
    in.micro_budget = cfg_.micro_steps;
    in.slot_dt = cfg_.energy.slot_dt;
    in.detection_radius = auvs_[m].detection_radius;
    in.sonar_beam = task.sonar_beam;
    in.sample_bits_per_m2 = task.sample_bits_per_m2;
    in.upload_distance_m = upload_distance_[m];
    in.upload_rate_bps = upload_rate_[m];
    in.paper_literal_delays = cfg_.paper_literal_delays;
    out.delays[m] = tasking::phase_delays(in);
    team.push_back(out.delays[m]);

    const double trans = vehicle::mission_energy(auvs_[m].detection_radius, upload_power_[m],
                                                 cfg_.energy, out.delays[m].upload_bits,
                                                 upload_rate_[m])
                             .transmission;
    auvs_[m].energy = vehicle::apply_energy(auvs_[m].energy, {&trans, 1});
  }

  out.coverage = tasking::coverage_ratio(selection_, radii, task.length, task.width);
  const auto outcome = tasking::task_time_and_efficiency(team, out.coverage);
  out.task_time = outcome.task_time;
  out.efficiency = outcome.efficiency;

  double reward_sum = 0.0;
  double kl_sum = 0.0;
  int covert_slots = 0;
  for (const auto& s : slots_) {
    reward_sum += s.reward.total;
    kl_sum += s.kl;
    covert_slots += s.covert ? 1 : 0;
  }
  const double count = static_cast<double>(slots_.size());
  out.mean_micro_reward = reward_sum / count;
  out.mean_kl = kl_sum / count;
  out.covert_rate = covert_slots / count;
  const auto& w = cfg_.weights;
  out.macro_reward = w.xi_coverage * out.coverage + w.xi_delay * out.task_time +
                     w.xi_micro * out.mean_micro_reward;
  out.slots = std::move(slots_);
  slots_.clear();
  for (const auto& auv : auvs_) out.energies.push_back(auv.energy);

  ++macro_index_;
  out.done = macro_index_ >= cfg_.macro_steps;
  phase_ = out.done ? Phase::kDone : Phase::kMacroReady;
  if (out.done) macro_index_ = cfg_.macro_steps - 1;
  return out;
}

MacroResult Environment::macro_step(std::span<const std::uint8_t> selection,
                                    std::span<const double> probabilities,
                                    const MicroController& controller) {
  begin_macro(selection, probabilities);
  for (int tau = 0; tau < cfg_.micro_steps; ++tau) {
    const auto actions = controller(*this);
    micro_step(actions);
  }
  return end_macro();
}

}  // namespace auvsim::env
