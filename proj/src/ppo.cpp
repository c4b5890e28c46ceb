#include "sentio/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sentio/errors.hpp"

namespace sentio {

namespace {

constexpr double kLogStdFloor = -20.0;
constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)

double floored(double log_std) { return std::max(log_std, kLogStdFloor); }

void format_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
  out += '\n';
}

}  // namespace

PolicyParams PolicyParams::init(int obs_dim, int action_dim,
                                const std::vector<int>& hidden_sizes, Rng& rng) {
  std::vector<int> actor_sizes{obs_dim};
  actor_sizes.insert(actor_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  actor_sizes.push_back(action_dim);
  std::vector<int> critic_sizes{obs_dim};
  critic_sizes.insert(critic_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  critic_sizes.push_back(1);

  PolicyParams p;
  p.actor = Mlp::xavier_uniform(std::move(actor_sizes), rng);
  p.critic = Mlp::xavier_uniform(std::move(critic_sizes), rng);
  p.log_std.assign(action_dim, -0.5);
  return p;
}

PolicyParams PolicyParams::zeros_like() const {
  PolicyParams z;
  z.actor = Mlp::zeros(actor.layer_sizes);
  z.critic = Mlp::zeros(critic.layer_sizes);
  z.log_std.assign(log_std.size(), 0.0);
  return z;
}

void RolloutBuffer::clear() {
  observations.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  dones.clear();
  values.clear();
}

void RolloutBuffer::store(std::span<const double> obs, std::span<const double> action,
                          double log_prob, double reward, bool done, double value) {
  observations.insert(observations.end(), obs.begin(), obs.end());
  actions.insert(actions.end(), action.begin(), action.end());
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  dones.push_back(done ? 1 : 0);
  values.push_back(value);
}

ForwardResult forward(const PolicyParams& params, std::span<const double> obs) {
  ForwardResult out;
  out.mean = params.actor.forward(obs);
  out.log_std = params.log_std;
  out.value = params.critic.forward(obs)[0];
  return out;
}

double gaussian_log_prob(std::span<const double> action, std::span<const double> mean,
                         std::span<const double> log_std) {
  double lp = 0.0;
  for (std::size_t d = 0; d < action.size(); ++d) {
    const double ls = floored(log_std[d]);
    const double z = (action[d] - mean[d]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - 0.5 * kLog2Pi;
  }
  return lp;
}

std::pair<std::vector<double>, double> sample_action(const PolicyParams& params,
                                                     std::span<const double> obs,
                                                     Rng& rng) {
  const std::vector<double> mean = params.actor.forward(obs);
  std::vector<double> action(mean.size());
  for (std::size_t d = 0; d < mean.size(); ++d) {
    action[d] = mean[d] + std::exp(floored(params.log_std[d])) * rng.normal();
  }
  const double lp = gaussian_log_prob(action, mean, params.log_std);
  return {std::move(action), lp};
}

std::pair<std::vector<double>, std::vector<double>> compute_gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<std::uint8_t>& dones, double bootstrap_value, double gamma,
    double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw DataError("compute_gae: input lengths disagree");
  }
  std::vector<double> advantages(n, 0.0);
  std::vector<double> returns(n, 0.0);
  double last = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = (i + 1 == n) ? bootstrap_value : values[i + 1];
    const double nonterminal = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * nonterminal - values[i];
    last = delta + gamma * lambda * nonterminal * last;
    advantages[i] = last;
    returns[i] = advantages[i] + values[i];
  }
  return {std::move(advantages), std::move(returns)};
}

void normalize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= advantages.size();
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= advantages.size();
  const double denom = std::sqrt(var) + 1e-8;
  for (double& a : advantages) a = (a - mean) / denom;
}

LossResult ppo_loss(const PolicyParams& params, const Minibatch& batch,
                    const PpoConfig& cfg, PolicyParams* grads) {
  const std::size_t m = batch.size();
  if (m == 0) throw DataError("ppo_loss: empty minibatch");
  const int obs_dim = batch.obs_dim;
  const int act_dim = batch.act_dim;
  const double inv_m = 1.0 / static_cast<double>(m);

  // Entropy of a state-independent diagonal Gaussian; identical per sample.
  double entropy = 0.0;
  for (double ls : params.log_std) entropy += floored(ls) + 0.5 * (1.0 + kLog2Pi);

  LossResult loss;
  loss.entropy = entropy;

  MlpTape actor_tape;
  MlpTape critic_tape;
  std::vector<double> mean_grad(act_dim);

  for (std::size_t s = 0; s < m; ++s) {
    const std::span<const double> obs(batch.observations.data() + s * obs_dim, obs_dim);
    const std::span<const double> action(batch.actions.data() + s * act_dim, act_dim);

    const std::vector<double> mean =
        grads ? forward_tape(params.actor, obs, actor_tape) : params.actor.forward(obs);
    const double value =
        (grads ? forward_tape(params.critic, obs, critic_tape)
               : params.critic.forward(obs))[0];

    const double new_lp = gaussian_log_prob(action, mean, params.log_std);
    const double ratio = std::exp(new_lp - batch.old_log_probs[s]);
    const double clipped =
        std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double adv = batch.advantages[s];
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    loss.policy += -std::min(surr1, surr2) * inv_m;

    const double verr = value - batch.returns[s];
    loss.value += verr * verr * inv_m;

    if (grads) {
      // d(surrogate)/d(ratio): through the raw ratio when it is the active
      // branch, through the clamp (zero outside the clip band) otherwise.
      double dsurr_dratio;
      if (surr1 <= surr2) {
        dsurr_dratio = adv;
      } else {
        dsurr_dratio =
            (ratio > 1.0 - cfg.clip_eps && ratio < 1.0 + cfg.clip_eps) ? adv : 0.0;
      }
      const double dloss_dlp = -inv_m * dsurr_dratio * ratio;

      for (int d = 0; d < act_dim; ++d) {
        const double ls = floored(params.log_std[d]);
        const double inv_sigma = std::exp(-ls);
        const double z = (action[d] - mean[d]) * inv_sigma;
        mean_grad[d] = dloss_dlp * z * inv_sigma;  // d lp / d mean = z / sigma
        if (params.log_std[d] > kLogStdFloor) {
          grads->log_std[d] += dloss_dlp * (z * z - 1.0);
        }
      }
      backward_tape(params.actor, actor_tape, mean_grad, grads->actor);

      const double value_grad = cfg.value_coef * 2.0 * verr * inv_m;
      backward_tape(params.critic, critic_tape, std::span(&value_grad, 1),
                    grads->critic);
    }
  }

  if (grads && cfg.entropy_coef != 0.0) {
    for (std::size_t d = 0; d < params.log_std.size(); ++d) {
      if (params.log_std[d] > kLogStdFloor) grads->log_std[d] -= cfg.entropy_coef;
    }
  }

  loss.total = loss.policy + cfg.value_coef * loss.value - cfg.entropy_coef * loss.entropy;
  if (!std::isfinite(loss.total)) {
    throw NumericError("ppo_loss: non-finite loss (policy=" + std::to_string(loss.policy) +
                       ", value=" + std::to_string(loss.value) + ")");
  }
  return loss;
}

double grad_check(const PolicyParams& params, const Minibatch& batch,
                  const PpoConfig& cfg) {
  if (params.param_count() == 0) return 0.0;

  PolicyParams grads = params.zeros_like();
  ppo_loss(params, batch, cfg, &grads);

  constexpr double h = 1e-5;
  PolicyParams work = params;
  double max_rel = 0.0;

  // Walk parameters positionally: perturb work's k-th parameter, compare
  // the finite difference against the analytic gradient at the same slot.
  std::vector<double*> slots;
  std::vector<double*> grad_slots;
  for_each_param(work, [&](double& v) { slots.push_back(&v); });
  for_each_param(grads, [&](double& v) { grad_slots.push_back(&v); });

  for (std::size_t k = 0; k < slots.size(); ++k) {
    const double original = *slots[k];
    *slots[k] = original + h;
    const double up = ppo_loss(work, batch, cfg, nullptr).total;
    *slots[k] = original - h;
    const double down = ppo_loss(work, batch, cfg, nullptr).total;
    *slots[k] = original;

    const double numeric = (up - down) / (2.0 * h);
    const double analytic = *grad_slots[k];
    const double rel = std::abs(analytic - numeric) /
                       std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

namespace {

void clip_global_norm(PolicyParams& grads, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for_each_param(grads, [&](double& g) { sq += g * g; });
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for_each_param(grads, [&](double& g) { g *= scale; });
  }
}

struct AdamState {
  PolicyParams m;
  PolicyParams v;
  long t = 0;
};

void apply_update(PolicyParams& params, PolicyParams& grads, const PpoConfig& cfg,
                  AdamState* adam) {
  if (adam) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++adam->t;
    const double bc1 = 1.0 - std::pow(beta1, adam->t);
    const double bc2 = 1.0 - std::pow(beta2, adam->t);
    std::vector<double*> g, m, v, p;
    for_each_param(grads, [&](double& x) { g.push_back(&x); });
    for_each_param(adam->m, [&](double& x) { m.push_back(&x); });
    for_each_param(adam->v, [&](double& x) { v.push_back(&x); });
    for_each_param(params, [&](double& x) { p.push_back(&x); });
    for (std::size_t k = 0; k < p.size(); ++k) {
      *m[k] = beta1 * *m[k] + (1.0 - beta1) * *g[k];
      *v[k] = beta2 * *v[k] + (1.0 - beta2) * *g[k] * *g[k];
      *p[k] -= cfg.learning_rate * (*m[k] / bc1) / (std::sqrt(*v[k] / bc2) + eps);
    }
  } else {
    for_each_param(params, grads,
                   [&](double& p, double& g) { p -= cfg.learning_rate * g; });
  }

  bool finite = true;
  for_each_param(params, [&](double& x) { finite = finite && std::isfinite(x); });
  if (!finite) throw NumericError("train: parameters became non-finite after update");
}

void fisher_yates(std::vector<int>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace

TrainResult train(const EnvFactory& env_factory, const PpoConfig& cfg) {
  auto env = env_factory();
  const int obs_dim = env->observation_size();
  const int act_dim = env->action_size();

  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng sample_rng(derive_seed(cfg.seed, 1));
  Rng shuffle_rng(derive_seed(cfg.seed, 2));

  TrainResult result;
  result.params = PolicyParams::init(obs_dim, act_dim, cfg.hidden_sizes, init_rng);
  PolicyParams& params = result.params;

  AdamState adam;
  const bool use_adam = cfg.optimizer == "adam";
  if (use_adam) {
    adam.m = params.zeros_like();
    adam.v = params.zeros_like();
  } else if (cfg.optimizer != "sgd") {
    throw ConfigError("train: unknown optimizer '" + cfg.optimizer + "'");
  }

  std::vector<double> obs = env->reset(derive_seed(cfg.seed, 3));
  std::vector<double> env_action(act_dim);

  RolloutBuffer buffer;
  buffer.obs_dim = obs_dim;
  buffer.act_dim = act_dim;

  double episode_return = 0.0;
  long steps_done = 0;
  int iteration = 0;

  while (steps_done < cfg.total_timesteps) {
    buffer.clear();
    std::vector<double> completed_returns;
    bool last_done = false;

    for (int t = 0; t < cfg.rollout_horizon; ++t) {
      const double value = params.critic.forward(obs)[0];
      auto [raw_action, log_prob] = sample_action(params, obs, sample_rng);
      for (int d = 0; d < act_dim; ++d) {
        const auto [lo, hi] = env->action_bounds(d);
        env_action[d] = std::clamp(raw_action[d], lo, hi);
      }
      StepOutcome out = env->step(env_action);
      buffer.store(obs, raw_action, log_prob, out.reward, out.done, value);
      episode_return += out.reward;
      last_done = out.done;
      if (out.done) {
        completed_returns.push_back(episode_return);
        episode_return = 0.0;
        obs = env->reset();
      } else {
        obs = std::move(out.observation);
      }
    }
    steps_done += cfg.rollout_horizon;
    ++iteration;

    const double bootstrap = last_done ? 0.0 : params.critic.forward(obs)[0];
    auto [advantages, returns] = compute_gae(buffer.rewards, buffer.values,
                                             buffer.dones, bootstrap, cfg.gamma,
                                             cfg.gae_lambda);

    std::vector<int> order(buffer.size());
    std::iota(order.begin(), order.end(), 0);

    double policy_acc = 0.0, value_acc = 0.0, entropy_acc = 0.0;
    int batches = 0;
    Minibatch mb;
    mb.obs_dim = obs_dim;
    mb.act_dim = act_dim;

    for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
      fisher_yates(order, shuffle_rng);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(cfg.minibatch_size)) {
        const std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch_size));
        const std::size_t n = end - start;

        mb.observations.assign(n * obs_dim, 0.0);
        mb.actions.assign(n * act_dim, 0.0);
        mb.old_log_probs.resize(n);
        mb.advantages.resize(n);
        mb.returns.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
          const int idx = order[start + k];
          std::copy_n(buffer.observations.begin() + idx * obs_dim, obs_dim,
                      mb.observations.begin() + k * obs_dim);
          std::copy_n(buffer.actions.begin() + idx * act_dim, act_dim,
                      mb.actions.begin() + k * act_dim);
          mb.old_log_probs[k] = buffer.log_probs[idx];
          mb.advantages[k] = advantages[idx];
          mb.returns[k] = returns[idx];
        }
        normalize_advantages(mb.advantages);

        PolicyParams grads = params.zeros_like();
        const LossResult loss = ppo_loss(params, mb, cfg, &grads);
        clip_global_norm(grads, cfg.grad_clip_norm);
        apply_update(params, grads, cfg, use_adam ? &adam : nullptr);

        policy_acc += loss.policy;
        value_acc += loss.value;
        entropy_acc += loss.entropy;
        ++batches;
      }
    }

    TrainLogRow row;
    row.iteration = iteration;
    row.timesteps = steps_done;
    if (!completed_returns.empty()) {
      double sum = 0.0;
      for (double r : completed_returns) sum += r;
      row.mean_ep_reward = sum / completed_returns.size();
    } else {
      row.mean_ep_reward = episode_return;  // episode still in progress
    }
    row.policy_loss = policy_acc / batches;
    row.value_loss = value_acc / batches;
    row.entropy = entropy_acc / batches;
    result.log.push_back(row);
  }
  return result;
}

void save_model(const PolicyParams& params, const std::filesystem::path& path) {
  std::string out;
  out += "SENTIO-MODEL v1\n";
  auto manifest = [&out](const char* name, const std::vector<int>& sizes) {
    out += name;
    for (int s : sizes) {
      out += ' ';
      out += std::to_string(s);
    }
    out += '\n';
  };
  manifest("actor", params.actor.layer_sizes);
  manifest("critic", params.critic.layer_sizes);
  out += "log_std " + std::to_string(params.log_std.size()) + "\n";

  for_each_param(params, [&out](const double& v) { format_value(out, v); });

  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("save_model: cannot open '" + path.string() + "'");
  file << out;
  if (!file) throw DataError("save_model: write failed for '" + path.string() + "'");
}

PolicyParams load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("load_model: cannot open '" + path.string() + "'");

  std::string header;
  std::getline(file, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "SENTIO-MODEL v1") {
    throw DataError("load_model: unsupported model version '" + header + "'");
  }

  auto read_manifest = [&file, &path](const std::string& expect) {
    std::string line;
    if (!std::getline(file, line)) {
      throw DataError("load_model: missing '" + expect + "' manifest in '" +
                      path.string() + "'");
    }
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    if (name != expect) {
      throw DataError("load_model: expected '" + expect + "' manifest, got '" + name + "'");
    }
    std::vector<int> sizes;
    int v = 0;
    while (ss >> v) sizes.push_back(v);
    if (sizes.empty()) throw DataError("load_model: empty '" + expect + "' manifest");
    return sizes;
  };

  const std::vector<int> actor_sizes = read_manifest("actor");
  const std::vector<int> critic_sizes = read_manifest("critic");
  const std::vector<int> log_std_sizes = read_manifest("log_std");

  PolicyParams params;
  params.actor = Mlp::zeros(actor_sizes);
  params.critic = Mlp::zeros(critic_sizes);
  params.log_std.assign(log_std_sizes.front(), 0.0);
  if (params.actor.output_size() != static_cast<int>(params.log_std.size())) {
    throw DataError("load_model: actor output dim " +
                    std::to_string(params.actor.output_size()) +
                    " disagrees with log_std dim " +
                    std::to_string(params.log_std.size()));
  }
  if (params.actor.input_size() != params.critic.input_size()) {
    throw DataError("load_model: actor/critic input dims disagree");
  }

  const std::size_t expected = params.param_count();
  std::vector<double> values;
  values.reserve(expected);
  std::string token;
  while (file >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      throw DataError("load_model: bad numeric value '" + token + "'");
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw DataError("load_model: expected " + std::to_string(expected) +
                    " parameter values, found " + std::to_string(values.size()));
  }

  std::size_t k = 0;
  for_each_param(params, [&](double& v) { v = values[k++]; });
  return params;
}

void write_training_log_csv(const std::vector<TrainLogRow>& log,
                            const std::filesystem::path& path) {
  std::string out = "iteration,timesteps,mean_ep_reward,policy_loss,value_loss,entropy\n";
  char buf[160];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%ld,%.17g,%.17g,%.17g,%.17g\n", row.iteration,
                  row.timesteps, row.mean_ep_reward, row.policy_loss, row.value_loss,
                  row.entropy);
    out += buf;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("write_training_log_csv: cannot open '" + path.string() + "'");
  file << out;
}

}  // namespace sentio
