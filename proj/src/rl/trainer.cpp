#include "auvsim/rl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "auvsim/rl/gae.hpp"

namespace auvsim::rl {
namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Vec3 uniform_in_ball(double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec3 d{normal(rng), normal(rng), normal(rng)};
  const double n = d.norm();
  if (n == 0.0) return {};
  return d * (radius * std::cbrt(unif(rng)) / n);
}

std::vector<std::uint8_t> random_nonempty_subset(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> g(n, 0);
  for (;;) {
    bool any = false;
    for (auto& b : g) {
      b = coin(rng) ? 1 : 0;
      any = any || b;
    }
    if (any) return g;
  }
}

void fill_advantages(std::vector<MicroTransition>& steps, double bootstrap, const PpoConfig& ppo) {
  std::vector<double> r, v;
  std::vector<std::uint8_t> d;
  for (const auto& s : steps) {
    r.push_back(s.reward);
    v.push_back(s.value);
    d.push_back(s.done);
  }
  const auto ar = gae(r, v, bootstrap, d, ppo.gamma, ppo.lambda);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    steps[i].advantage = ar.advantages[i];
    steps[i].ret = ar.returns[i];
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(base) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

EpisodeRollout run_episode(const PolicySet& pol, const env::EnvConfig& cfg, const PpoConfig& ppo,
                           int episode, std::uint64_t env_seed, std::uint64_t action_seed,
                           const RolloutOptions& opts) {
  env::Environment e(cfg);
  e.reset(env_seed);
  std::mt19937_64 rng(action_seed);
  const std::size_t n = static_cast<std::size_t>(cfg.num_auvs);
  const ActionBounds bounds{cfg.power_min, cfg.power_max, cfg.speed_max};
  const double scale = ppo.reward_scale;

  EpisodeRollout out;
  out.metrics.episode = episode;
  std::vector<double> macro_in(macro_actor_input(n)), macro_cin(macro_critic_input(n));
  std::vector<double> local(kMicroActorInput), cin(micro_critic_input(n));
  double kl_sum = 0.0, covert = 0.0, micro_sum = 0.0;
  long slots = 0;

  for (int t = 0; t < cfg.macro_steps; ++t) {
    macro_actor_features(e.macro_observe(), macro_in);
    macro_critic_features(e, macro_cin);
    const std::vector<double> logits = pol.macro_actor.forward(macro_in);
    MacroTransition mt;
    std::vector<double> probs;
    for (double z : logits) probs.push_back(sigmoid(z));
    switch (opts.macro) {
      case MacroMode::kSample: {
        auto s = bernoulli_head(logits, rng);
        mt.selection = s.selection;
        mt.log_prob = s.log_prob;
        break;
      }
      case MacroMode::kGreedy:
        mt.selection = bernoulli_mode(logits);
        break;
      case MacroMode::kRandomSubset:
        mt.selection = random_nonempty_subset(n, rng);
        break;
    }
    if (opts.record_transitions) {
      mt.state = macro_in;
      mt.critic_in = macro_cin;
      mt.value = pol.macro_critic.forward(macro_cin)[0];
    }
    const std::vector<std::uint8_t> sel = e.begin_macro(mt.selection, probs);

    std::vector<MicroSegment> segs;
    std::vector<std::size_t> seg_of(n, 0);
    for (std::size_t m = 0; m < n; ++m)
      if (sel[m]) {
        seg_of[m] = segs.size();
        segs.push_back({m, {}, 0.0});
      }

    std::vector<env::MicroAction> actions(n);
    for (int tau = 0; tau < cfg.micro_steps; ++tau) {
      for (std::size_t m = 0; m < n; ++m) {
        actions[m] = {};
        if (!sel[m]) continue;
        const auto& actor = pol.micro_actors[pol.actor_index(m)];
        local_features(e.micro_observe(m), local);
        const std::vector<double> mean = actor.net.forward(local);
        MicroTransition tr;
        SquashedAction a;
        switch (opts.micro) {
          case MicroMode::kSample: {
            auto s = gaussian_head(mean, actor.log_std, bounds, rng);
            std::copy(s.u.begin(), s.u.end(), tr.u.begin());
            tr.log_prob = s.log_prob;
            a = s.action;
            break;
          }
          case MicroMode::kGreedy:
            std::copy(mean.begin(), mean.end(), tr.u.begin());
            a = gaussian_mode(mean, bounds);
            break;
          case MicroMode::kRandomVelocity: {
            a = gaussian_mode(mean, bounds);
            a.velocity = uniform_in_ball(cfg.speed_max, rng);
            if (opts.random_power)
              a.power = std::uniform_real_distribution<double>(cfg.power_min, cfg.power_max)(rng);
            break;
          }
        }
        actions[m] = {a.power, a.velocity};
        if (opts.record_transitions) {
          micro_critic_features(e, m, cin);
          tr.obs = local;
          tr.critic_in = cin;
          tr.value = pol.micro_critics[pol.critic_index(m)].forward(cin)[0];
          segs[seg_of[m]].steps.push_back(std::move(tr));
        }
      }
      const env::MicroStepResult res = e.micro_step(actions);
      for (std::size_t m = 0; m < n; ++m) {
        if (!sel[m]) continue;
        if (opts.record_transitions) segs[seg_of[m]].steps.back().reward = scale * res.agent_rewards[m];
        if (opts.record_trajectories) {
          const auto& auv = e.auvs()[m];
          out.trajectories.push_back({episode, t, res.slot, m, auv.position, res.executed[m].velocity,
                                      res.executed[m].power, auv.energy, e.distance_to_subtarget(m),
                                      res.snr, res.kl, res.covert, res.arrived_now[m] != 0,
                                      res.agent_rewards[m]});
        }
      }
    }
    if (opts.record_transitions) {
      for (auto& seg : segs) {
        micro_critic_features(e, seg.auv, cin);
        seg.bootstrap = pol.micro_critics[pol.critic_index(seg.auv)].forward(cin)[0];
        fill_advantages(seg.steps, seg.bootstrap, ppo);
        out.micro.push_back(std::move(seg));
      }
    }

    env::MacroResult mr = e.end_macro();
    for (const auto& s : mr.slots) {
      kl_sum += s.kl;
      covert += s.covert ? 1.0 : 0.0;
      micro_sum += s.reward.total;
      ++slots;
    }
    mr.slots.clear();
    auto& em = out.metrics;
    em.macro_reward += mr.macro_reward;
    em.zeta += mr.coverage;
    em.eta += mr.efficiency;
    em.t_task += mr.task_time;
    em.repairs += mr.repaired ? 1 : 0;
    if (opts.record_transitions) {
      mt.reward = scale * mr.macro_reward;
      mt.done = mr.done ? 1 : 0;
      out.macro.push_back(std::move(mt));
    }
    out.macros.push_back(std::move(mr));
  }

  auto& em = out.metrics;
  const double steps = static_cast<double>(cfg.macro_steps);
  em.zeta /= steps;
  em.eta /= steps;
  em.t_task /= steps;
  em.micro_reward = micro_sum / static_cast<double>(slots);
  em.mean_kl = kl_sum / static_cast<double>(slots);
  em.covert_rate = covert / static_cast<double>(slots);
  for (const auto& a : e.auvs()) em.mean_energy += a.energy;
  em.mean_energy /= static_cast<double>(n);

  if (opts.record_transitions && !out.macro.empty()) {
    std::vector<double> r, v;
    std::vector<std::uint8_t> d;
    for (const auto& m : out.macro) {
      r.push_back(m.reward);
      v.push_back(m.value);
      d.push_back(m.done);
    }
    const auto ar = gae(r, v, 0.0, d, ppo.gamma, ppo.lambda);
    for (std::size_t i = 0; i < out.macro.size(); ++i) {
      out.macro[i].advantage = ar.advantages[i];
      out.macro[i].ret = ar.returns[i];
    }
  }
  return out;
}

Trainer::Trainer(TrainerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.env.validate();
  cfg_.ppo.validate();
  cfg_.nets.validate();
  if (cfg_.episodes < 0) throw std::invalid_argument("train.episodes must be >= 0");
  if (cfg_.workers < 1) throw std::invalid_argument("run.workers must be >= 1");
  const std::size_t n = static_cast<std::size_t>(cfg_.env.num_auvs);
  std::mt19937_64 init_rng(derive_seed(cfg_.seed, 0xA11CE, 0));
  policies_ = PolicySet(cfg_.nets, n, init_rng);
  rng_.seed(derive_seed(cfg_.seed, 0xB0B, 0));

  for (const auto& a : policies_.micro_actors) {
    actor_adam_.emplace_back(a.net.parameter_count(), cfg_.ppo.actor_lr);
    log_std_adam_.emplace_back(a.log_std.size(), cfg_.ppo.actor_lr);
  }
  for (const auto& c : policies_.micro_critics) critic_adam_.emplace_back(c.parameter_count(), cfg_.ppo.critic_lr);
  macro_actor_adam_ = Adam(policies_.macro_actor.parameter_count(), cfg_.ppo.macro_actor_lr);
  macro_critic_adam_ = Adam(policies_.macro_critic.parameter_count(), cfg_.ppo.macro_critic_lr);

  // One buffer when everything is shared, else one per AUV.
  const bool shared = cfg_.nets.share_actor && cfg_.nets.share_critic;
  const std::size_t buffers = shared ? 1 : n;
  micro_buffers_.resize(buffers);
  for (std::size_t k = 0; k < buffers; ++k) buffer_auv_.push_back(k);
}

std::size_t Trainer::buffer_index(std::size_t auv) const {
  return micro_buffers_.size() == 1 ? 0 : auv;
}

void Trainer::train(const EpisodeCallback& on_episode) {
  const env::EnvConfig& ecfg = cfg_.env;
  while (episodes_done_ < cfg_.episodes) {
    const int round = std::min(cfg_.workers, cfg_.episodes - episodes_done_);
    std::vector<EpisodeRollout> results(static_cast<std::size_t>(round));
    auto job = [&](int w) {
      const int ep = episodes_done_ + w;
      results[static_cast<std::size_t>(w)] =
          run_episode(policies_, ecfg, cfg_.ppo, ep, derive_seed(cfg_.seed, 1, static_cast<std::uint64_t>(ep)),
                      derive_seed(cfg_.seed, 2, static_cast<std::uint64_t>(ep)), RolloutOptions{});
    };
    if (round == 1) {
      job(0);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(round));
      for (int w = 0; w < round; ++w)
        threads.emplace_back([&, w] {
          try {
            job(w);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      for (auto& th : threads) th.join();
      for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    }
    for (auto& r : results) {
      absorb(r);
      if (on_episode) on_episode(r);
    }
  }
}

void Trainer::absorb(EpisodeRollout& r) {
  for (auto& seg : r.micro) {
    auto& buf = micro_buffers_[buffer_index(seg.auv)];
    for (auto& s : seg.steps) buf.push_back(std::move(s));
    micro_transitions_ += static_cast<long>(seg.steps.size());
    seg.steps.clear();
    const std::size_t k = buffer_index(seg.auv);
    while (micro_buffers_[k].size() >= static_cast<std::size_t>(cfg_.ppo.micro_update)) update_micro(k);
  }
  for (auto& m : r.macro) {
    macro_buffer_.push_back(std::move(m));
    ++macro_transitions_;
  }
  r.macro.clear();
  while (macro_buffer_.size() >= static_cast<std::size_t>(cfg_.ppo.macro_update)) update_macro();
  ++episodes_done_;
}

void Trainer::update_micro(std::size_t k) {
  const auto& ppo = cfg_.ppo;
  const std::size_t u = static_cast<std::size_t>(ppo.micro_update);
  std::vector<MicroTransition> batch;
  batch.reserve(u);
  auto& buf = micro_buffers_[k];
  for (std::size_t i = 0; i < u; ++i) {
    batch.push_back(std::move(buf.front()));
    buf.pop_front();
  }
  const std::size_t auv = buffer_auv_[k];
  const std::size_t ai = policies_.actor_index(auv);
  const std::size_t ci = policies_.critic_index(auv);
  GaussianActor& actor = policies_.micro_actors[ai];
  DenseNet& critic = policies_.micro_critics[ci];
  const std::size_t din = kMicroActorInput;
  const std::size_t dc = critic.input_size();

  std::vector<std::size_t> perm(u);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> x, xc, grad_a(actor.net.parameter_count()), grad_c(critic.parameter_count());
  std::vector<double> dmean, dls(kMicroActionDim), newlp, ent, adv, oldlp, vals, rets;
  std::array<double, kMicroActionDim> gm{}, gl{};
  DenseNet::Cache cache_a, cache_c;
  const std::size_t mb_size = static_cast<std::size_t>(ppo.micro_minibatch);
  UpdateLog log;
  int minibatches = 0;

  for (int epoch = 0; epoch < ppo.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (std::size_t start = 0; start < u; start += mb_size) {
      const std::size_t b = std::min(mb_size, u - start);
      x.resize(b * din);
      xc.resize(b * dc);
      adv.resize(b);
      oldlp.resize(b);
      rets.resize(b);
      for (std::size_t i = 0; i < b; ++i) {
        const auto& tr = batch[perm[start + i]];
        std::copy(tr.obs.begin(), tr.obs.end(), x.begin() + static_cast<long>(i * din));
        std::copy(tr.critic_in.begin(), tr.critic_in.end(), xc.begin() + static_cast<long>(i * dc));
        adv[i] = tr.advantage;
        oldlp[i] = tr.log_prob;
        rets[i] = tr.ret;
      }
      if (ppo.normalize_advantages) normalize_advantages(adv, ppo.adv_eps);

      actor.net.forward_batch(x, b, cache_a);
      const auto& means = cache_a.act.back();
      newlp.resize(b);
      ent.assign(b, gaussian_entropy(actor.log_std));
      for (std::size_t i = 0; i < b; ++i) {
        const auto& tr = batch[perm[start + i]];
        newlp[i] = gaussian_log_prob(tr.u, std::span(means).subspan(i * kMicroActionDim, kMicroActionDim),
                                     actor.log_std);
      }
      const ActorLoss al = ppo_actor_loss(newlp, oldlp, adv, ent, ppo.clip, ppo.entropy_coeff);
      dmean.assign(b * kMicroActionDim, 0.0);
      std::fill(dls.begin(), dls.end(), 0.0);
      for (std::size_t i = 0; i < b; ++i) {
        const auto& tr = batch[perm[start + i]];
        gaussian_log_prob_grad(tr.u, std::span(means).subspan(i * kMicroActionDim, kMicroActionDim),
                               actor.log_std, gm, gl);
        for (std::size_t j = 0; j < kMicroActionDim; ++j) {
          dmean[i * kMicroActionDim + j] = al.d_log_prob[i] * gm[j];
          dls[j] += al.d_log_prob[i] * gl[j] + al.d_entropy;
        }
      }
      std::fill(grad_a.begin(), grad_a.end(), 0.0);
      actor.net.backward_batch(cache_a, dmean, grad_a);
      log.grad_norm = clip_grad_norm({std::span(grad_a), std::span(dls)}, ppo.max_grad_norm);
      actor_adam_[ai].step(actor.net.params(), grad_a);
      log_std_adam_[ai].step(actor.log_std, dls);
      for (double& ls : actor.log_std) ls = std::clamp(ls, kLogStdMin, kLogStdMax);

      critic.forward_batch(xc, b, cache_c);
      vals = cache_c.act.back();
      const CriticLoss cl = ppo_critic_loss(vals, rets);
      std::fill(grad_c.begin(), grad_c.end(), 0.0);
      std::vector<double> dv = cl.d_value;
      critic.backward_batch(cache_c, dv, grad_c);
      clip_grad_norm({std::span(grad_c)}, ppo.max_grad_norm);
      critic_adam_[ci].step(critic.params(), grad_c);

      log.actor_loss += al.loss;
      log.critic_loss += cl.loss;
      log.clip_fraction += al.clip_fraction;
      ++minibatches;
    }
  }
  log.actor_loss /= minibatches;
  log.critic_loss /= minibatches;
  log.clip_fraction /= minibatches;
  micro_log_ = log;
  ++micro_updates_;
}

void Trainer::update_macro() {
  const auto& ppo = cfg_.ppo;
  const std::size_t u = static_cast<std::size_t>(ppo.macro_update);
  std::vector<MacroTransition> batch;
  for (std::size_t i = 0; i < u; ++i) {
    batch.push_back(std::move(macro_buffer_.front()));
    macro_buffer_.pop_front();
  }
  DenseNet& actor = policies_.macro_actor;
  DenseNet& critic = policies_.macro_critic;
  const std::size_t n = actor.output_size();
  const std::size_t din = actor.input_size();
  const std::size_t dc = critic.input_size();

  std::vector<std::size_t> perm(u);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> x, xc, grad_a(actor.parameter_count()), grad_c(critic.parameter_count());
  std::vector<double> dlogits, newlp, ent, adv, oldlp, rets, glp(n), gent(n);
  DenseNet::Cache cache_a, cache_c;
  const std::size_t mb_size = static_cast<std::size_t>(ppo.macro_minibatch);
  UpdateLog log;
  int minibatches = 0;

  for (int epoch = 0; epoch < ppo.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (std::size_t start = 0; start < u; start += mb_size) {
      const std::size_t b = std::min(mb_size, u - start);
      x.resize(b * din);
      xc.resize(b * dc);
      adv.resize(b);
      oldlp.resize(b);
      rets.resize(b);
      for (std::size_t i = 0; i < b; ++i) {
        const auto& tr = batch[perm[start + i]];
        std::copy(tr.state.begin(), tr.state.end(), x.begin() + static_cast<long>(i * din));
        std::copy(tr.critic_in.begin(), tr.critic_in.end(), xc.begin() + static_cast<long>(i * dc));
        adv[i] = tr.advantage;
        oldlp[i] = tr.log_prob;
        rets[i] = tr.ret;
      }
      if (ppo.normalize_advantages) normalize_advantages(adv, ppo.adv_eps);

      actor.forward_batch(x, b, cache_a);
      const auto& logits = cache_a.act.back();
      newlp.resize(b);
      ent.resize(b);
      for (std::size_t i = 0; i < b; ++i) {
        const auto z = std::span(logits).subspan(i * n, n);
        newlp[i] = bernoulli_log_prob(z, batch[perm[start + i]].selection);
        ent[i] = bernoulli_entropy(z);
      }
      const ActorLoss al = ppo_actor_loss(newlp, oldlp, adv, ent, ppo.clip, ppo.entropy_coeff);
      dlogits.assign(b * n, 0.0);
      for (std::size_t i = 0; i < b; ++i) {
        const auto z = std::span(logits).subspan(i * n, n);
        bernoulli_log_prob_grad(z, batch[perm[start + i]].selection, glp);
        bernoulli_entropy_grad(z, gent);
        for (std::size_t j = 0; j < n; ++j)
          dlogits[i * n + j] = al.d_log_prob[i] * glp[j] + al.d_entropy * gent[j];
      }
      std::fill(grad_a.begin(), grad_a.end(), 0.0);
      actor.backward_batch(cache_a, dlogits, grad_a);
      log.grad_norm = clip_grad_norm({std::span(grad_a)}, ppo.max_grad_norm);
      macro_actor_adam_.step(actor.params(), grad_a);

      critic.forward_batch(xc, b, cache_c);
      const std::vector<double> vals = cache_c.act.back();
      const CriticLoss cl = ppo_critic_loss(vals, rets);
      std::fill(grad_c.begin(), grad_c.end(), 0.0);
      critic.backward_batch(cache_c, cl.d_value, grad_c);
      clip_grad_norm({std::span(grad_c)}, ppo.max_grad_norm);
      macro_critic_adam_.step(critic.params(), grad_c);

      log.actor_loss += al.loss;
      log.critic_loss += cl.loss;
      log.clip_fraction += al.clip_fraction;
      ++minibatches;
    }
  }
  log.actor_loss /= minibatches;
  log.critic_loss /= minibatches;
  log.clip_fraction /= minibatches;
  macro_log_ = log;
  ++macro_updates_;
}

}  // namespace auvsim::rl
