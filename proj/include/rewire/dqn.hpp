#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rewire/env.hpp"
#include "rewire/gnn.hpp"
#include "rewire/rng.hpp"
#include "rewire/stats.hpp"

namespace rewire {

struct Transition {
  RewireState state;
  Node action = 0;
  double reward = 0.0;
  RewireState next_state;
  bool terminal = false;
};

/// Fixed-capacity ring; once full, each push overwrites the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 12000);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i-th oldest transition still held.
  const Transition& at(std::size_t i) const;
  /// `count` uniform draws with replacement.
  std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct TrainConfig {
  long total_steps = 120000;
  double eps_start = 1.0;
  double eps_end = 0.1;
  long eps_decay_steps = 40000;
  int batch_size = 50;
  int target_sync_every = 50;
  double learning_rate = 5e-4;
  double gamma = 1.0;
  long validation_every = 500;
  std::size_t replay_capacity = 12000;
  double budget_fraction = 0.15;
  int embedding_dim = 128;
  int rounds = 3;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Linear decay from eps_start to eps_end over eps_decay_steps, then flat.
double epsilon(long step, const TrainConfig& cfg);

/// Argmax of eval-mode Q over the valid actions; ties go to the lowest id.
Node greedy_action(const RewireState& s, const ModelParams& p);

/// Epsilon-greedy: uniform over valid actions with probability eps.
Node behave(const RewireState& s, const ModelParams& p, double eps, Rng& rng);

/// r for terminal transitions, otherwise r + gamma * max_a' Q_target(s', a').
double td_target(const Transition& tr, const ModelParams& target, double gamma = 1.0);
std::vector<double> td_targets(std::span<const Transition* const> batch, const ModelParams& target, double gamma = 1.0);

/// Adam with the usual moment constants.
class Adam {
 public:
  Adam(const ModelParams& like, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(ModelParams& params, const ModelParams& grad);
  long steps() const { return t_; }

 private:
  ModelParams m_;
  ModelParams v_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
};

/// One minibatch update on the mean squared TD error. Returns the loss
/// before the update. Throws std::invalid_argument if the buffer holds fewer
/// than batch_size transitions.
double train_step(const ReplayBuffer& buffer, ModelParams& online, const ModelParams& target, Adam& optimizer,
                  const TrainConfig& cfg, Rng& rng);

struct PolicyEvaluation {
  std::vector<double> delta;        // per graph; 0 for disconnected finals
  std::vector<char> connected;
  std::vector<int> episode_length;  // sub-steps taken
  Summary summary;                  // over connected finals only
  std::size_t disconnected = 0;
  /// Mean over all graphs of the gain, with disconnected finals scored as
  /// penalty / reward_scale; used for checkpoint selection.
  double score = 0.0;
  Summary score_summary;
};

EpisodeResult greedy_policy_episode(const ModelParams& p, const RewireEnv& env, const Graph& g0, double budget_fraction);

PolicyEvaluation evaluate_policy(const ModelParams& p, std::span<const Graph> graphs, const EnvConfig& env_config,
                                 double budget_fraction, int workers = 1);

struct CurvePoint {
  long step = 0;
  double validation_mean = 0.0;
  double validation_ci = 0.0;
  double best_so_far = 0.0;
};

struct TrainResult {
  ModelParams best;
  std::vector<CurvePoint> curve;
  double best_score = 0.0;
  long best_step = 0;
};

/// DQN training loop. Each step takes one environment sub-step on the
/// current episode (graphs visited round-robin, a fresh episode per visit),
/// stores the transition and, once the buffer holds a batch, performs one
/// train_step. The target network is refreshed every target_sync_every
/// steps; every validation_every steps the greedy policy is scored on the
/// validation graphs and the best parameters are kept.
TrainResult train(std::span<const Graph> train_graphs, std::span<const Graph> validation_graphs,
                  const EnvConfig& env_config, const TrainConfig& cfg,
                  const std::function<void(const CurvePoint&)>& progress = {});

/// Header `step,validation_mean,validation_ci,best_so_far`.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace rewire
