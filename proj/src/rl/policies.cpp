#include "auvsim/rl/policies.hpp"

#include <cstring>
#include <stdexcept>

namespace auvsim::rl {
namespace {

std::vector<std::size_t> widths(std::size_t in, std::size_t hidden, int layers, std::size_t out) {
  std::vector<std::size_t> w{in};
  for (int i = 0; i < layers; ++i) w.push_back(hidden);
  w.push_back(out);
  return w;
}

void fnv(std::uint64_t& h, std::span<const double> xs) {
  for (double x : xs) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
}

void check(std::span<double> out, std::size_t n, const char* what) {
  if (out.size() != n) throw std::invalid_argument(std::string(what) + ": output has the wrong width");
}

}  // namespace

void NetConfig::validate() const {
  auto require = [](bool ok, const char* key) {
    if (!ok) throw std::invalid_argument(std::string("net.") + key + " out of range");
  };
  require(actor_hidden > 0, "actor_hidden");
  require(critic_hidden > 0, "critic_hidden");
  require(macro_hidden > 0, "macro_hidden");
  require(hidden_layers >= 0, "hidden_layers");
  require(hidden_gain > 0.0, "hidden_gain");
  require(policy_output_gain > 0.0, "policy_output_gain");
  require(value_output_gain > 0.0, "value_output_gain");
}

std::size_t micro_critic_input(std::size_t m) { return kCriticFeaturesPerAuv * m + 6 + kMicroActorInput; }
std::size_t macro_actor_input(std::size_t m) { return env::kMacroFeaturesPerAuv * m; }
std::size_t macro_critic_input(std::size_t m) { return env::kMacroFeaturesPerAuv * m + 4; }

void local_features(const env::MicroObservation& o, std::span<double> out) {
  check(out, kMicroActorInput, "local_features");
  for (std::size_t i = 0; i < 6; ++i) out[i] = o[i] / kDistanceScale;
  for (std::size_t i = 6; i < 9; ++i) out[i] = o[i] / kSpeedScale;
  out[9] = o[9];
  out[10] = o[10] / kEnergyScale;
}

void micro_critic_features(const env::Environment& e, std::size_t m, std::span<double> out) {
  const auto auvs = e.auvs();
  check(out, micro_critic_input(auvs.size()), "micro_critic_features");
  const auto& cfg = e.config();
  std::size_t k = 0;
  for (std::size_t j = 0; j < auvs.size(); ++j) {
    const auto& a = auvs[j];
    out[k++] = a.position.x / kDistanceScale;
    out[k++] = a.position.y / kDistanceScale;
    out[k++] = a.position.z / kDistanceScale;
    out[k++] = a.velocity.x / kSpeedScale;
    out[k++] = a.velocity.y / kSpeedScale;
    out[k++] = a.velocity.z / kSpeedScale;
    out[k++] = a.energy / kEnergyScale;
    out[k++] = e.selection()[j] ? 1.0 : 0.0;
    out[k++] = e.distance_to_subtarget(j) / kDistanceScale;
    out[k++] = distance(a.position, cfg.eavesdropper) / kDistanceScale;
  }
  const auto& task = e.current_task();
  out[k++] = task.center.x / kDistanceScale;
  out[k++] = task.center.y / kDistanceScale;
  out[k++] = task.center.z / kDistanceScale;
  out[k++] = task.length / kDistanceScale;
  out[k++] = task.width / kDistanceScale;
  out[k++] = static_cast<double>(e.slot()) / cfg.micro_steps;
  local_features(e.micro_observe(m), out.subspan(k, kMicroActorInput));
}

void macro_actor_features(const env::MacroState& s, std::span<double> out) {
  check(out, s.size(), "macro_actor_features");
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = s[i] / (i % env::kMacroFeaturesPerAuv == 3 ? kEnergyScale : kDistanceScale);
}

void macro_critic_features(const env::Environment& e, std::span<double> out) {
  const std::size_t n = e.auvs().size();
  check(out, macro_critic_input(n), "macro_critic_features");
  macro_actor_features(e.macro_observe(), out.first(macro_actor_input(n)));
  const auto& task = e.current_task();
  std::size_t k = macro_actor_input(n);
  out[k++] = task.center.x / kDistanceScale;
  out[k++] = task.center.y / kDistanceScale;
  out[k++] = task.center.z / kDistanceScale;
  out[k++] = static_cast<double>(e.macro_index()) / e.config().macro_steps;
}

PolicySet::PolicySet(const NetConfig& cfg, std::size_t num_auvs, std::mt19937_64& rng)
    : cfg_(cfg), num_auvs_(num_auvs) {
  cfg_.validate();
  if (num_auvs == 0) throw std::invalid_argument("PolicySet: need at least one AUV");
  const std::size_t n_actors = cfg.share_actor ? 1 : num_auvs;
  const std::size_t n_critics = cfg.share_critic ? 1 : num_auvs;
  for (std::size_t i = 0; i < n_actors; ++i) {
    GaussianActor a{DenseNet(widths(kMicroActorInput, cfg.actor_hidden, cfg.hidden_layers, kMicroActionDim)),
                    std::vector<double>(kMicroActionDim, cfg.init_log_std)};
    a.net.init_orthogonal(rng, cfg.hidden_gain, cfg.policy_output_gain);
    micro_actors.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < n_critics; ++i) {
    DenseNet c(widths(micro_critic_input(num_auvs), cfg.critic_hidden, cfg.hidden_layers, 1));
    c.init_orthogonal(rng, cfg.hidden_gain, cfg.value_output_gain);
    micro_critics.push_back(std::move(c));
  }
  macro_actor = DenseNet(widths(macro_actor_input(num_auvs), cfg.macro_hidden, cfg.hidden_layers, num_auvs));
  macro_actor.init_orthogonal(rng, cfg.hidden_gain, cfg.policy_output_gain);
  macro_critic = DenseNet(widths(macro_critic_input(num_auvs), cfg.macro_hidden, cfg.hidden_layers, 1));
  macro_critic.init_orthogonal(rng, cfg.hidden_gain, cfg.value_output_gain);
}

std::size_t PolicySet::parameter_count() const {
  std::size_t n = macro_actor.parameter_count() + macro_critic.parameter_count();
  for (const auto& a : micro_actors) n += a.net.parameter_count() + a.log_std.size();
  for (const auto& c : micro_critics) n += c.parameter_count();
  return n;
}

std::uint64_t PolicySet::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& a : micro_actors) {
    fnv(h, a.net.params());
    fnv(h, a.log_std);
  }
  for (const auto& c : micro_critics) fnv(h, c.params());
  fnv(h, macro_actor.params());
  fnv(h, macro_critic.params());
  return h;
}

}  // namespace auvsim::rl
