#include "rewire/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rewire {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t oldest = items_.size() < capacity_ ? 0 : next_;
  return items_[(oldest + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  if (items_.empty()) throw std::invalid_argument("ReplayBuffer::sample: buffer is empty");
  std::vector<const Transition*> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(&items_[uniform_index(rng, items_.size())]);
  return out;
}

double epsilon(long step, const TrainConfig& cfg) {
  if (cfg.eps_decay_steps <= 0) return cfg.eps_end;
  const double frac = static_cast<double>(std::min(std::max(step, 0L), cfg.eps_decay_steps)) /
                      static_cast<double>(cfg.eps_decay_steps);
  return cfg.eps_start - (cfg.eps_start - cfg.eps_end) * frac;
}

Node greedy_action(const RewireState& s, const ModelParams& p) {
  const auto actions = valid_actions(s);
  if (actions.empty()) throw std::invalid_argument("greedy_action: no valid action");
  const auto q = q_values(s, actions, p, NormMode::Eval);
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return actions[best];
}

Node behave(const RewireState& s, const ModelParams& p, double eps, Rng& rng) {
  const auto actions = valid_actions(s);
  if (actions.empty()) throw std::invalid_argument("behave: no valid action");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < eps) return actions[uniform_index(rng, actions.size())];
  return greedy_action(s, p);
}

std::vector<double> td_targets(std::span<const Transition* const> batch, const ModelParams& target, double gamma) {
  std::vector<double> out(batch.size());
  std::vector<const RewireState*> open;
  std::vector<std::size_t> open_index;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i] = batch[i]->reward;
    if (!batch[i]->terminal) {
      open.push_back(&batch[i]->next_state);
      open_index.push_back(i);
    }
  }
  const auto next_q = max_q_values(open, target);
  for (std::size_t k = 0; k < open.size(); ++k) out[open_index[k]] += gamma * next_q[k];
  return out;
}

double td_target(const Transition& tr, const ModelParams& target, double gamma) {
  const Transition* one[] = {&tr};
  return td_targets(one, target, gamma).front();
}

Adam::Adam(const ModelParams& like, double learning_rate, double beta1, double beta2, double eps)
    : m_(like.zeros_like()), v_(like.zeros_like()), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(ModelParams& params, const ModelParams& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto p = params.learnables();
  const auto g = grad.learnables();
  auto m = m_.learnables();
  auto v = v_.learnables();
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& gi = *g[i].second;
    *m[i].second = beta1_ * *m[i].second + (1.0 - beta1_) * gi;
    *v[i].second = (beta2_ * v[i].second->array() + (1.0 - beta2_) * gi.array().square()).matrix();
    const auto m_hat = m[i].second->array() / c1;
    const auto v_hat = v[i].second->array() / c2;
    p[i].second->array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
  }
}

double train_step(const ReplayBuffer& buffer, ModelParams& online, const ModelParams& target, Adam& optimizer,
                  const TrainConfig& cfg, Rng& rng) {
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  if (buffer.size() < batch_size || batch_size == 0) {
    throw std::invalid_argument("train_step: replay buffer holds fewer than batch_size transitions");
  }
  const auto batch = buffer.sample(batch_size, rng);
  const auto targets = td_targets(batch, target, cfg.gamma);

  std::vector<const RewireState*> states;
  std::vector<QQuery> queries;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    states.push_back(&batch[i]->state);
    queries.push_back({i, batch[i]->action});
  }
  const QBatch forward(online, states, queries, NormMode::Train);
  const auto q = forward.values();
  double loss = 0.0;
  std::vector<double> dq(q.size());
  const double scale = 1.0 / static_cast<double>(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = q[i] - targets[i];
    loss += r * r * scale;
    dq[i] = 2.0 * r * scale;
  }
  const ModelParams grad = forward.gradients(dq);
  forward.update_running_stats(online);
  optimizer.step(online, grad);
  return loss;
}

EpisodeResult greedy_policy_episode(const ModelParams& p, const RewireEnv& env, const Graph& g0,
                                    double budget_fraction) {
  return run_episode(env, g0, budget_fraction,
                     [&](const RewireState& s, std::span<const Node>) { return greedy_action(s, p); });
}

PolicyEvaluation evaluate_policy(const ModelParams& p, std::span<const Graph> graphs, const EnvConfig& env_config,
                                 double budget_fraction, int workers) {
  const RewireEnv env(env_config);
  PolicyEvaluation out;
  out.delta.assign(graphs.size(), 0.0);
  out.connected.assign(graphs.size(), 0);
  out.episode_length.assign(graphs.size(), 0);
  parallel_for(graphs.size(), workers, [&](std::size_t i) {
    const EpisodeResult r = greedy_policy_episode(p, env, graphs[i], budget_fraction);
    out.delta[i] = r.delta;
    out.connected[i] = r.connected ? 1 : 0;
    out.episode_length[i] = static_cast<int>(r.trace.size());
  });
  std::vector<double> kept;
  std::vector<double> scores;
  const double penalty_gain = env_config.disconnection_penalty / env_config.objective.reward_scale;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (out.connected[i]) {
      kept.push_back(out.delta[i]);
      scores.push_back(out.delta[i]);
    } else {
      ++out.disconnected;
      scores.push_back(penalty_gain);
    }
  }
  out.summary = summarize(kept);
  out.score_summary = summarize(scores);
  out.score = graphs.empty() ? 0.0 : out.score_summary.mean;
  return out;
}

TrainResult train(std::span<const Graph> train_graphs, std::span<const Graph> validation_graphs,
                  const EnvConfig& env_config, const TrainConfig& cfg,
                  const std::function<void(const CurvePoint&)>& progress) {
  TrainResult result;
  ModelParams online = init_params(cfg.embedding_dim, cfg.rounds, cfg.seed);
  result.best = online;
  result.best_score = -std::numeric_limits<double>::infinity();
  if (cfg.total_steps <= 0) return result;
  if (train_graphs.empty()) throw std::invalid_argument("train: no training graphs");
  if (cfg.validation_every > 0 && validation_graphs.empty()) throw std::invalid_argument("train: no validation graphs");

  const RewireEnv env(env_config);
  ModelParams target = online;
  Adam optimizer(online, cfg.learning_rate);
  ReplayBuffer buffer(cfg.replay_capacity);
  Rng batch_rng = make_rng(cfg.seed, 1);

  std::uint64_t episode = 0;
  std::size_t graph_index = 0;
  Rng behavior_rng;
  RewireState state;
  auto start_episode = [&] {
    // Skip graphs that admit no move at all; they cannot produce transitions.
    for (std::size_t tries = 0; tries <= train_graphs.size(); ++tries) {
      state = env.reset(train_graphs[graph_index], cfg.budget_fraction);
      graph_index = (graph_index + 1) % train_graphs.size();
      if (!state.terminal) {
        behavior_rng = make_rng(cfg.seed, 1000 + episode++);
        return;
      }
    }
    throw std::invalid_argument("train: no training graph admits a rewiring");
  };
  start_episode();

  for (long step = 0; step < cfg.total_steps; ++step) {
    const Node action = behave(state, online, epsilon(step, cfg), behavior_rng);
    StepOutcome out = env.step(state, action);
    const bool terminal = out.terminal;
    RewireState next = out.next_state;
    buffer.push(Transition{std::move(state), action, out.reward, std::move(out.next_state), terminal});
    if (terminal) {
      start_episode();
    } else {
      state = std::move(next);
    }

    if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      train_step(buffer, online, target, optimizer, cfg, batch_rng);
    }
    if (cfg.target_sync_every > 0 && (step + 1) % cfg.target_sync_every == 0) target = online;

    if (cfg.validation_every > 0 && (step + 1) % cfg.validation_every == 0) {
      const auto eval = evaluate_policy(online, validation_graphs, env_config, cfg.budget_fraction, cfg.workers);
      if (eval.score > result.best_score) {
        result.best_score = eval.score;
        result.best = online;
        result.best_step = step + 1;
      }
      result.curve.push_back({step + 1, eval.score, eval.score_summary.ci95, result.best_score});
      if (progress) progress(result.curve.back());
    }
  }
  if (result.curve.empty()) result.best = online;
  return result;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "step,validation_mean,validation_ci,best_so_far\n";
  out << std::setprecision(17);
  for (const auto& c : curve) {
    out << c.step << ',' << c.validation_mean << ',' << c.validation_ci << ',' << c.best_so_far << '\n';
  }
}

}  // namespace rewire
