#include "auvsim/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace auvsim {
namespace {

struct Entry {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

template <class Field>
Entry real(std::string key, Field f) {
  return {key, [f](const ExperimentConfig& c) { return format_double(f(const_cast<ExperimentConfig&>(c))); },
          [f, key](ExperimentConfig& c, const std::string& v) { f(c) = parse_double(key, v); }};
}

template <class Field>
Entry integer(std::string key, Field f) {
  return {key, [f](const ExperimentConfig& c) { return std::to_string(f(const_cast<ExperimentConfig&>(c))); },
          [f, key](ExperimentConfig& c, const std::string& v) {
            const long long i = parse_int(key, v);
            using T = std::remove_reference_t<decltype(f(c))>;
            if (i < 0 && std::is_unsigned_v<T>) throw ConfigError(key, "must be >= 0");
            f(c) = static_cast<T>(i);
          }};
}

template <class Field>
Entry boolean(std::string key, Field f) {
  return {key, [f](const ExperimentConfig& c) { return f(const_cast<ExperimentConfig&>(c)) ? "true" : "false"; },
          [f, key](ExperimentConfig& c, const std::string& v) { f(c) = parse_bool(key, v); }};
}

template <class Field>
Entry text(std::string key, Field f) {
  return {key, [f](const ExperimentConfig& c) { return f(const_cast<ExperimentConfig&>(c)); },
          [f](ExperimentConfig& c, const std::string& v) { f(c) = v; }};
}

#define FIELD(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(integer("env.num_auvs", FIELD(env.num_auvs)));
    e.push_back(integer("env.macro_steps", FIELD(env.macro_steps)));
    e.push_back(integer("env.micro_steps", FIELD(env.micro_steps)));
    e.push_back(real("arena.x_min", FIELD(env.arena.lo.x)));
    e.push_back(real("arena.x_max", FIELD(env.arena.hi.x)));
    e.push_back(real("arena.y_min", FIELD(env.arena.lo.y)));
    e.push_back(real("arena.y_max", FIELD(env.arena.hi.y)));
    e.push_back(real("arena.z_min", FIELD(env.arena.lo.z)));
    e.push_back(real("arena.z_max", FIELD(env.arena.hi.z)));
    e.push_back(real("epsilon", FIELD(env.epsilon)));

    e.push_back(real("channel.carrier_f", FIELD(env.channel.carrier_khz)));
    e.push_back(real("channel.bandwidth_B", FIELD(env.channel.bandwidth_hz)));
    e.push_back(real("channel.spreading_chi", FIELD(env.channel.spreading)));
    e.push_back(real("channel.shipping_s", FIELD(env.channel.shipping)));
    e.push_back(real("channel.wind_w", FIELD(env.channel.wind_mps)));
    e.push_back({"channel.noise_override",
                 [](const ExperimentConfig& c) {
                   return c.env.channel.noise_override_w ? format_double(*c.env.channel.noise_override_w)
                                                         : std::string("none");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "none")
                     c.env.channel.noise_override_w.reset();
                   else
                     c.env.channel.noise_override_w = parse_double("channel.noise_override", v);
                 }});

    e.push_back(real("energy.weight_G", FIELD(env.energy.weight)));
    e.push_back(real("energy.water_density", FIELD(env.energy.water_density)));
    e.push_back(real("energy.cross_section_A", FIELD(env.energy.cross_section)));
    e.push_back(real("energy.drag_Cd", FIELD(env.energy.drag_coeff)));
    e.push_back(real("energy.detect_coeff", FIELD(env.energy.detect_coeff)));
    e.push_back(real("energy.acoustic_efficiency", FIELD(env.energy.acoustic_efficiency)));
    e.push_back(real("energy.slot_dt", FIELD(env.energy.slot_dt)));
    e.push_back(boolean("energy.charge_ascent", FIELD(env.energy.charge_ascent)));
    e.push_back(real("energy.init_min", FIELD(env.energy_init_min)));
    e.push_back(real("energy.init_max", FIELD(env.energy_init_max)));

    e.push_back(integer("ocean.vortex_count", FIELD(env.ocean.vortex_count)));
    e.push_back(real("ocean.core_radius_min", FIELD(env.ocean.core_radius_min)));
    e.push_back(real("ocean.core_radius_max", FIELD(env.ocean.core_radius_max)));
    e.push_back(real("ocean.circulation_min", FIELD(env.ocean.circulation_min)));
    e.push_back(real("ocean.circulation_max", FIELD(env.ocean.circulation_max)));
    e.push_back(real("ocean.vertical_factor", FIELD(env.ocean.vertical_factor)));
    e.push_back(real("ocean.viscosity", FIELD(env.ocean.viscosity)));
    e.push_back(real("ocean.background_x", FIELD(env.ocean.background.x)));
    e.push_back(real("ocean.background_y", FIELD(env.ocean.background.y)));
    e.push_back(real("ocean.background_z", FIELD(env.ocean.background.z)));
    e.push_back(real("ocean.max_speed", FIELD(env.ocean.max_speed)));

    e.push_back(real("task.length", FIELD(env.task.length)));
    e.push_back(real("task.width", FIELD(env.task.width)));
    e.push_back(real("task.instruction_bits", FIELD(env.task.instruction_bits)));
    e.push_back(real("task.sample_bits_per_m2", FIELD(env.task.sample_bits_per_m2)));
    e.push_back(real("task.sonar_beam", FIELD(env.task.sonar_beam)));
    e.push_back(real("task.base_radius", FIELD(env.task.base_radius)));
    e.push_back(real("task.radius_gain", FIELD(env.task.radius_gain)));
    e.push_back(real("task.compute_ref", FIELD(env.task.compute_ref)));
    e.push_back(real("task.compute", FIELD(env.task.compute)));
    e.push_back(integer("task.placement_attempts", FIELD(env.task.placement_attempts)));

    e.push_back(real("auv.power_min", FIELD(env.power_min)));
    e.push_back(real("auv.power_max", FIELD(env.power_max)));
    e.push_back(real("auv.speed_max", FIELD(env.speed_max)));
    e.push_back(real("auv.dv_max", FIELD(env.dv_max)));
    e.push_back(real("eavesdropper.x", FIELD(env.eavesdropper.x)));
    e.push_back(real("eavesdropper.y", FIELD(env.eavesdropper.y)));
    e.push_back(real("eavesdropper.z", FIELD(env.eavesdropper.z)));
    e.push_back(real("central.x", FIELD(env.central.x)));
    e.push_back(real("central.y", FIELD(env.central.y)));
    e.push_back(real("central.z", FIELD(env.central.z)));

    e.push_back(real("reward.xi_coverage", FIELD(env.weights.xi_coverage)));
    e.push_back(real("reward.xi_delay", FIELD(env.weights.xi_delay)));
    e.push_back(real("reward.xi_micro", FIELD(env.weights.xi_micro)));
    e.push_back(real("reward.phi_covert", FIELD(env.weights.phi_covert)));
    e.push_back(real("reward.phi_task", FIELD(env.weights.phi_task)));
    e.push_back(real("reward.phi_target", FIELD(env.weights.phi_target)));
    e.push_back(real("reward.phi_energy", FIELD(env.weights.phi_energy)));
    e.push_back(real("reward.task_bonus", FIELD(env.weights.task_bonus)));
    e.push_back(real("reward.progress_gain", FIELD(env.weights.progress_gain)));
    e.push_back(real("reward.regress_gain", FIELD(env.weights.regress_gain)));

    e.push_back({"fidelity.thorp_variant",
                 [](const ExperimentConfig& c) {
                   return std::string(c.env.channel.thorp == acoustics::ThorpVariant::kStandardF2
                                          ? "standard"
                                          : "paper_literal");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "standard")
                     c.env.channel.thorp = acoustics::ThorpVariant::kStandardF2;
                   else if (v == "paper_literal")
                     c.env.channel.thorp = acoustics::ThorpVariant::kPaperLiteralF3;
                   else
                     throw ConfigError("fidelity.thorp_variant", "expected standard or paper_literal");
                 }});
    e.push_back(boolean("fidelity.paper_literal_delays", FIELD(env.paper_literal_delays)));
    e.push_back(boolean("fidelity.drift_displacement", FIELD(env.drift_displacement)));

    e.push_back(real("ppo.clip", FIELD(ppo.clip)));
    e.push_back(real("ppo.gamma", FIELD(ppo.gamma)));
    e.push_back(real("ppo.lambda", FIELD(ppo.lambda)));
    e.push_back(integer("ppo.epochs", FIELD(ppo.epochs)));
    e.push_back(integer("ppo.micro_minibatch", FIELD(ppo.micro_minibatch)));
    e.push_back(integer("ppo.macro_minibatch", FIELD(ppo.macro_minibatch)));
    e.push_back(integer("ppo.micro_update", FIELD(ppo.micro_update)));
    e.push_back(integer("ppo.macro_update", FIELD(ppo.macro_update)));
    e.push_back(real("ppo.actor_lr", FIELD(ppo.actor_lr)));
    e.push_back(real("ppo.critic_lr", FIELD(ppo.critic_lr)));
    e.push_back(real("ppo.macro_actor_lr", FIELD(ppo.macro_actor_lr)));
    e.push_back(real("ppo.macro_critic_lr", FIELD(ppo.macro_critic_lr)));
    e.push_back(real("ppo.entropy_coeff", FIELD(ppo.entropy_coeff)));
    e.push_back(real("ppo.max_grad_norm", FIELD(ppo.max_grad_norm)));
    e.push_back(real("ppo.adv_eps", FIELD(ppo.adv_eps)));
    e.push_back(boolean("ppo.normalize_advantages", FIELD(ppo.normalize_advantages)));
    e.push_back(real("ppo.reward_scale", FIELD(ppo.reward_scale)));

    e.push_back(integer("net.actor_hidden", FIELD(nets.actor_hidden)));
    e.push_back(integer("net.critic_hidden", FIELD(nets.critic_hidden)));
    e.push_back(integer("net.macro_hidden", FIELD(nets.macro_hidden)));
    e.push_back(integer("net.hidden_layers", FIELD(nets.hidden_layers)));
    e.push_back(real("net.init_log_std", FIELD(nets.init_log_std)));
    e.push_back(real("net.hidden_gain", FIELD(nets.hidden_gain)));
    e.push_back(real("net.policy_output_gain", FIELD(nets.policy_output_gain)));
    e.push_back(real("net.value_output_gain", FIELD(nets.value_output_gain)));
    e.push_back(boolean("net.share_actor", FIELD(nets.share_actor)));
    e.push_back(boolean("net.share_critic", FIELD(nets.share_critic)));

    e.push_back(integer("run.seed", FIELD(run.seed)));
    e.push_back(integer("run.workers", FIELD(run.workers)));
    e.push_back(text("run.out_dir", FIELD(run.out_dir)));
    e.push_back(boolean("run.dump_trajectories", FIELD(run.dump_trajectories)));
    e.push_back(text("run.simd", FIELD(run.simd)));
    e.push_back(integer("train.episodes", FIELD(run.episodes)));
    e.push_back(integer("train.checkpoint_every", FIELD(run.checkpoint_every)));
    e.push_back(integer("eval.episodes", FIELD(run.eval_episodes)));
    e.push_back(text("eval.checkpoint", FIELD(run.checkpoint)));
    e.push_back(text("baseline.kind", FIELD(run.baseline_kind)));
    e.push_back(boolean("baseline.random_power", FIELD(run.baseline_random_power)));
    e.push_back({"sweep.epsilons",
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (double v : c.run.sweep_epsilons) s += (s.empty() ? "" : ",") + format_double(v);
                   return s;
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   std::vector<double> out;
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) out.push_back(parse_double("sweep.epsilons", trim(item)));
                   if (out.empty()) throw ConfigError("sweep.epsilons", "need at least one value");
                   c.run.sweep_epsilons = out;
                 }});
    e.push_back(boolean("sweep.train", FIELD(run.sweep_train)));
    return e;
  }();
  return entries;
}

#undef FIELD

const Entry& find(const std::string& key) {
  for (const auto& e : registry())
    if (e.key == key) return e;
  throw ConfigError(key, "unknown configuration key");
}

bool hashed(const std::string& key) {
  for (const char* p : {"run.", "train.", "eval.", "baseline.", "sweep."})
    if (key.rfind(p, 0) == 0) return false;
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    env.validate();
    ppo.validate();
    nets.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto cut = std::min(msg.find(':'), msg.find(' '));
    if (cut == std::string::npos) throw ConfigError(msg, "invalid value");
    throw ConfigError(msg.substr(0, cut), trim(msg.substr(cut + (msg[cut] == ':' ? 1 : 0))));
  }
  if (run.workers < 1) throw ConfigError("run.workers", "must be >= 1");
  if (run.simd != "auto" && run.simd != "scalar" && run.simd != "avx2")
    throw ConfigError("run.simd", "expected auto, scalar or avx2");
  if (run.episodes < 0) throw ConfigError("train.episodes", "must be >= 0");
  if (run.checkpoint_every < 0) throw ConfigError("train.checkpoint_every", "must be >= 0");
  if (run.eval_episodes < 1) throw ConfigError("eval.episodes", "must be >= 1");
  if (run.baseline_kind != "random_G" && run.baseline_kind != "random_V")
    throw ConfigError("baseline.kind", "expected random_G or random_V");
  for (double eps : run.sweep_epsilons)
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("sweep.epsilons", "values must lie in (0, 1]");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.push_back(e.key);
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  find(key).set(cfg, value);
}

std::string get_setting(const ExperimentConfig& cfg, const std::string& key) { return find(key).get(cfg); }

void apply_text(ExperimentConfig& cfg, const std::string& body, const std::string& source) {
  std::istringstream in(body);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, source + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (path) {
    std::ifstream f(*path);
    if (!f) throw std::runtime_error("cannot read config file " + path->string());
    std::stringstream ss;
    ss << f.rdbuf();
    apply_text(cfg, ss.str(), path->string());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(o, "override must look like key=value");
    apply_setting(cfg, trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& e : registry()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& e : registry()) {
    if (!hashed(e.key)) continue;
    for (unsigned char ch : e.key + "=" + e.get(cfg) + "\n") {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace auvsim
