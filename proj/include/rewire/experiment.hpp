#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rewire/attack.hpp"
#include "rewire/dqn.hpp"
#include "rewire/generators.hpp"
#include "rewire/ingest.hpp"
#include "rewire/objectives.hpp"

namespace rewire {

/// Graph sets drawn from the master seed. Each set owns its own seed range.
enum class GraphSet { Train = 0, Validation = 1, Test = 2, Sweep = 3, Attack = 4, Timing = 5 };

std::string to_string(GraphSet set);

/// Seed of the index-th graph in `set`.
std::uint64_t graph_seed(std::uint64_t master_seed, GraphSet set, std::size_t index);

/// Learning rate, message-passing rounds and embedding width per
/// (objective, graph family).
struct HyperParams {
  double learning_rate = 5e-4;
  int rounds = 3;
  int embedding_dim = 128;
};

HyperParams default_hyperparams(ObjectiveKind objective, const std::string& model_label);

struct SweepConfig {
  std::vector<int> sizes{10, 30, 100, 300};
  std::vector<double> budgets{0.05, 0.10, 0.15, 0.20, 0.25};
  int graphs_per_cell = 20;
};

struct AttackConfig {
  int n = 100;
  int graphs = 20;
  std::string graph_file;  // edge list; when set, used instead of generated graphs
};

struct TimingConfig {
  std::vector<int> sizes{10, 20, 30, 50, 100};
  int repeats = 3;
};

struct ExperimentConfig {
  ObjectiveKind objective = ObjectiveKind::Merw;
  GeneratorSpec graph = spec_from_label("BA-2", 30, 0);
  std::size_t n_train = 600;
  std::size_t n_validation = 200;
  std::size_t n_test = 100;
  double budget_fraction = 0.15;
  int seeds = 10;
  std::uint64_t master_seed = 0;
  TrainConfig train;
  SweepConfig sweep;
  AttackConfig attack;
  TimingConfig timing;
  int workers = 1;
  double timeout_seconds = 0.0;  // 0 disables the Greedy deadline

  EnvConfig env() const;
  /// Throws std::invalid_argument for inconsistent settings, including
  /// overlapping train/validation/test seeds.
  void validate() const;
};

/// Defaults for one (objective, family) pair, with its hyperparameters applied.
ExperimentConfig default_config(ObjectiveKind objective, const std::string& model_label);

/// Reads a nested JSON document. Missing keys keep their defaults; the
/// hyperparameter defaults follow the objective and graph family given.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Generator spec for a graph of size n drawn with `seed`.
GeneratorSpec graph_spec(const ExperimentConfig& cfg, int n, std::uint64_t seed);

/// `count` graphs of size n from `set`, generated in index order.
std::vector<Graph> make_graph_set(const ExperimentConfig& cfg, GraphSet set, std::size_t count, int n);

struct ResultRow {
  std::string method;
  std::string objective;
  std::string model;
  int n = 0;
  double budget_fraction = 0.0;
  long seed = 0;
  std::string metric;
  double value = 0.0;
};

/// Header `method,objective,model,n,budget_fraction,seed,metric,value`.
void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_results_csv_file(const std::string& path, std::span<const ResultRow> rows);

/// A rewiring strategy: Random, Greedy, the identity, or trained checkpoints.
struct Method {
  enum class Kind { Random, Greedy, Noop, Dqn };
  Kind kind = Kind::Random;
  std::vector<std::string> checkpoints;

  std::string name() const;
};

/// "random", "greedy", "noop", or one or more checkpoint paths
/// ("dqn:a.json,b.json" or a bare path).
Method parse_method(const std::string& text);

struct RewireOutcome {
  Graph final_graph;
  bool connected = true;
  double delta = 0.0;
};

/// Rewires g0 with the method. `replicate` picks the checkpoint for DQN and
/// the random stream for Random. Greedy throws TimeoutError past the
/// configured timeout.
RewireOutcome rewire_with(const Method& method, std::span<const ModelParams> models, const ExperimentConfig& cfg,
                          const Graph& g0, double budget_fraction, std::uint64_t replicate_seed, std::size_t replicate);

/// Loads every checkpoint of a DQN method; empty for baselines.
std::vector<ModelParams> load_models(const Method& method);

/// Writes `count` edge lists for `set` plus manifest.json. Returns the paths.
std::vector<std::string> cmd_generate(const ExperimentConfig& cfg, GraphSet set, std::size_t count,
                                      const std::string& out_dir);

/// Trains one model per seed on the train/validation sets. Writes
/// checkpoint_seed<k>.json and curve_seed<k>.csv, and returns the rows
/// (best validation score and step per seed).
std::vector<ResultRow> cmd_train(const ExperimentConfig& cfg, const std::string& out_dir,
                                 const std::function<void(int, const CurvePoint&)>& progress = {});

struct EvalSummary {
  std::string method;
  Summary delta;  // connected finals only
  std::size_t disconnected = 0;
  std::size_t graphs = 0;
};

/// Runs the method on the test set once per replicate (one per checkpoint,
/// or `cfg.seeds` streams for Random, one pass for Greedy and Noop).
/// Writes results.csv and summary.json when out_dir is non-empty.
EvalSummary cmd_eval(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir,
                     std::vector<ResultRow>* rows = nullptr);

/// Fresh graphs for every (size, budget) cell, one row triple
/// (delta_mean, delta_ci95, disconnected) per replicate. Greedy is rejected.
std::vector<ResultRow> cmd_sweep(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir);

struct AttackSummary {
  std::string method;
  Summary normalized;  // pooled over entries of every connected rewiring
  std::size_t graphs = 0;
  std::size_t disconnected = 0;
  bool infeasible = false;  // Greedy hit the timeout
};

/// Rewires each attack graph and runs the random-walk attack on it. Uses
/// cfg.attack.graph_file with every node as an entry when set, otherwise
/// generated graphs with the synthetic entry rule.
AttackSummary cmd_attack(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir,
                         std::vector<ResultRow>* rows = nullptr);

/// Wall-clock seconds per full episode for each method and size; inf when
/// the method times out.
std::vector<ResultRow> cmd_timing(const ExperimentConfig& cfg, std::span<const Method> methods,
                                  const std::string& out_dir);

/// Reads an event CSV, runs the host-graph pipeline and writes graph.edges,
/// hosts.txt and summary.json.
IngestResult cmd_ingest(const std::string& csv_path, const IngestOptions& opts, const std::string& out_dir,
                        const std::string& src_column = "", const std::string& dst_column = "");

}  // namespace rewire
