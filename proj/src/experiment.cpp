#include "rewire/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "rewire/baselines.hpp"

namespace rewire {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSetShift = 40;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

json summary_json(const Summary& s) {
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return format_double(v);
  };
  return {{"mean", num(s.mean)}, {"ci95", num(s.ci95)}, {"stddev", num(s.stddev)}, {"count", s.count}};
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string model_label(const ExperimentConfig& cfg) { return cfg.graph.label(); }

ResultRow make_row(const ExperimentConfig& cfg, const std::string& method, int n, double budget, long seed,
                   const std::string& metric, double value) {
  return {method, to_string(cfg.objective), model_label(cfg), n, budget, seed, metric, value};
}

Deadline deadline_for(const ExperimentConfig& cfg) {
  if (cfg.timeout_seconds <= 0) return std::nullopt;
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(
             std::chrono::duration<double>(cfg.timeout_seconds));
}

std::size_t replicate_count(const Method& method, const ExperimentConfig& cfg) {
  switch (method.kind) {
    case Method::Kind::Dqn:
      return method.checkpoints.size();
    case Method::Kind::Random:
      return static_cast<std::size_t>(std::max(1, cfg.seeds));
    default:
      return 1;
  }
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t replicate, std::size_t graph) {
  return mix_seed(mix_seed(cfg.master_seed, 0xE7A1 + replicate), graph);
}

}  // namespace

std::string to_string(GraphSet set) {
  switch (set) {
    case GraphSet::Train: return "train";
    case GraphSet::Validation: return "validation";
    case GraphSet::Test: return "test";
    case GraphSet::Sweep: return "sweep";
    case GraphSet::Attack: return "attack";
    case GraphSet::Timing: return "timing";
  }
  return "unknown";
}

std::uint64_t graph_seed(std::uint64_t master_seed, GraphSet set, std::size_t index) {
  return mix_seed(master_seed, (static_cast<std::uint64_t>(set) << kSetShift) | index);
}

HyperParams default_hyperparams(ObjectiveKind objective, const std::string& model_label) {
  HyperParams hp;
  hp.embedding_dim = objective == ObjectiveKind::Merw ? 128 : 64;
  if (model_label == "BA-2" || model_label == "BA") {
    hp.rounds = 3;
    hp.learning_rate = objective == ObjectiveKind::Merw ? 5e-4 : 1e-3;
  } else if (model_label == "BA-1") {
    hp.rounds = 6;
    hp.learning_rate = 5e-4;
  } else if (model_label == "ER") {
    hp.rounds = 4;
    hp.learning_rate = objective == ObjectiveKind::Merw ? 5e-4 : 1e-4;
  } else if (model_label == "WS") {
    hp.rounds = 6;
    hp.learning_rate = 1e-3;
  } else {
    throw std::invalid_argument("unknown graph family '" + model_label + "'");
  }
  return hp;
}

EnvConfig ExperimentConfig::env() const { return EnvConfig{ObjectiveConfig::defaults(objective), -10.0}; }

void ExperimentConfig::validate() const {
  graph.validate();
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw std::invalid_argument("budget_fraction must lie in (0, 1]");
  }
  if (seeds < 1) throw std::invalid_argument("seeds must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (timeout_seconds < 0) throw std::invalid_argument("timeout must be non-negative");
  constexpr std::size_t kIndexLimit = std::size_t{1} << kSetShift;
  if (n_train >= kIndexLimit || n_validation >= kIndexLimit || n_test >= kIndexLimit) {
    throw std::invalid_argument("graph set too large");
  }
  std::unordered_set<std::uint64_t> seen;
  auto claim = [&](GraphSet set, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      if (!seen.insert(graph_seed(master_seed, set, i)).second) {
        throw std::invalid_argument("graph seeds overlap between train/validation/test sets");
      }
    }
  };
  claim(GraphSet::Train, n_train);
  claim(GraphSet::Validation, n_validation);
  claim(GraphSet::Test, n_test);
  for (double b : sweep.budgets) {
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("sweep budgets must lie in (0, 1]");
  }
  for (int n : sweep.sizes) {
    if (n < 3) throw std::invalid_argument("sweep sizes must be at least 3");
  }
}

ExperimentConfig default_config(ObjectiveKind objective, const std::string& model_label) {
  ExperimentConfig cfg;
  cfg.objective = objective;
  cfg.graph = spec_from_label(model_label, 30, 0);
  const HyperParams hp = default_hyperparams(objective, cfg.graph.label());
  cfg.train.learning_rate = hp.learning_rate;
  cfg.train.rounds = hp.rounds;
  cfg.train.embedding_dim = hp.embedding_dim;
  return cfg;
}

ExperimentConfig parse_config(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  try {
    const ObjectiveKind objective = parse_objective(j.value("objective", std::string("merw")));
    std::string label = "BA-2";
    if (j.contains("graph")) label = j["graph"].value("model", label);
    ExperimentConfig cfg = default_config(objective, label);

    if (j.contains("graph")) {
      const json& g = j["graph"];
      read_if(g, "n", cfg.graph.n);
      read_if(g, "attach", cfg.graph.attach);
      read_if(g, "k", cfg.graph.lattice_k);
      read_if(g, "p", cfg.graph.p);
    }
    if (j.contains("data")) {
      const json& d = j["data"];
      read_if(d, "n_train", cfg.n_train);
      read_if(d, "n_validation", cfg.n_validation);
      read_if(d, "n_test", cfg.n_test);
    }
    read_if(j, "budget_fraction", cfg.budget_fraction);
    read_if(j, "seeds", cfg.seeds);
    read_if(j, "master_seed", cfg.master_seed);
    read_if(j, "workers", cfg.workers);
    read_if(j, "timeout", cfg.timeout_seconds);
    if (j.contains("train")) {
      const json& t = j["train"];
      TrainConfig& tc = cfg.train;
      read_if(t, "total_steps", tc.total_steps);
      read_if(t, "eps_start", tc.eps_start);
      read_if(t, "eps_end", tc.eps_end);
      read_if(t, "eps_decay_steps", tc.eps_decay_steps);
      read_if(t, "batch_size", tc.batch_size);
      read_if(t, "target_sync_every", tc.target_sync_every);
      read_if(t, "learning_rate", tc.learning_rate);
      read_if(t, "gamma", tc.gamma);
      read_if(t, "validation_every", tc.validation_every);
      read_if(t, "replay_capacity", tc.replay_capacity);
      read_if(t, "embedding_dim", tc.embedding_dim);
      read_if(t, "rounds", tc.rounds);
    }
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      read_if(s, "sizes", cfg.sweep.sizes);
      read_if(s, "budgets", cfg.sweep.budgets);
      read_if(s, "graphs_per_cell", cfg.sweep.graphs_per_cell);
    }
    if (j.contains("attack")) {
      const json& a = j["attack"];
      read_if(a, "n", cfg.attack.n);
      read_if(a, "graphs", cfg.attack.graphs);
      read_if(a, "graph_file", cfg.attack.graph_file);
    }
    if (j.contains("timing")) {
      const json& t = j["timing"];
      read_if(t, "sizes", cfg.timing.sizes);
      read_if(t, "repeats", cfg.timing.repeats);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return parse_config(in);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const TrainConfig& t = cfg.train;
  json j = {
      {"objective", to_string(cfg.objective)},
      {"graph", {{"model", cfg.graph.label()}, {"n", cfg.graph.n}, {"attach", cfg.graph.attach},
                 {"k", cfg.graph.lattice_k}, {"p", cfg.graph.p}}},
      {"data", {{"n_train", cfg.n_train}, {"n_validation", cfg.n_validation}, {"n_test", cfg.n_test}}},
      {"budget_fraction", cfg.budget_fraction},
      {"seeds", cfg.seeds},
      {"master_seed", cfg.master_seed},
      {"workers", cfg.workers},
      {"timeout", cfg.timeout_seconds},
      {"train",
       {{"total_steps", t.total_steps}, {"eps_start", t.eps_start}, {"eps_end", t.eps_end},
        {"eps_decay_steps", t.eps_decay_steps}, {"batch_size", t.batch_size},
        {"target_sync_every", t.target_sync_every}, {"learning_rate", t.learning_rate}, {"gamma", t.gamma},
        {"validation_every", t.validation_every}, {"replay_capacity", t.replay_capacity},
        {"embedding_dim", t.embedding_dim}, {"rounds", t.rounds}}},
      {"sweep", {{"sizes", cfg.sweep.sizes}, {"budgets", cfg.sweep.budgets},
                 {"graphs_per_cell", cfg.sweep.graphs_per_cell}}},
      {"attack", {{"n", cfg.attack.n}, {"graphs", cfg.attack.graphs}, {"graph_file", cfg.attack.graph_file}}},
      {"timing", {{"sizes", cfg.timing.sizes}, {"repeats", cfg.timing.repeats}}},
  };
  return j.dump(2);
}

GeneratorSpec graph_spec(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  GeneratorSpec spec = cfg.graph;
  spec.n = n;
  spec.seed = seed;
  if (spec.model == GraphModel::WattsStrogatz) spec.lattice_k = std::min(spec.lattice_k, n - 1 - (n - 1) % 2);
  return spec;
}

std::vector<Graph> make_graph_set(const ExperimentConfig& cfg, GraphSet set, std::size_t count, int n) {
  std::vector<Graph> out(count);
  parallel_for(count, cfg.workers,
               [&](std::size_t i) { out[i] = generate(graph_spec(cfg, n, graph_seed(cfg.master_seed, set, i))); });
  return out;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "method,objective,model,n,budget_fraction,seed,metric,value\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.objective << ',' << r.model << ',' << r.n << ',' << format_double(r.budget_fraction)
        << ',' << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

void write_results_csv_file(const std::string& path, std::span<const ResultRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_results_csv(out, rows);
}

std::string Method::name() const {
  switch (kind) {
    case Kind::Random: return "random";
    case Kind::Greedy: return "greedy";
    case Kind::Noop: return "noop";
    case Kind::Dqn: return "dqn";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  Method m;
  if (lower == "random") {
    m.kind = Method::Kind::Random;
  } else if (lower == "greedy") {
    m.kind = Method::Kind::Greedy;
  } else if (lower == "noop") {
    m.kind = Method::Kind::Noop;
  } else {
    m.kind = Method::Kind::Dqn;
    std::string list = text.rfind("dqn:", 0) == 0 ? text.substr(4) : text;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) m.checkpoints.push_back(item);
    }
    if (m.checkpoints.empty()) throw std::invalid_argument("method '" + text + "' names no checkpoint");
  }
  return m;
}

std::vector<ModelParams> load_models(const Method& method) {
  std::vector<ModelParams> out;
  for (const auto& path : method.checkpoints) out.push_back(load_checkpoint_file(path));
  return out;
}

RewireOutcome rewire_with(const Method& method, std::span<const ModelParams> models, const ExperimentConfig& cfg,
                          const Graph& g0, double budget_fraction, std::uint64_t replicate_seed, std::size_t replicate) {
  const RewireEnv env(cfg.env());
  switch (method.kind) {
    case Method::Kind::Noop:
      return {g0, true, 0.0};
    case Method::Kind::Random: {
      Rng rng = make_rng(replicate_seed, 0);
      const EpisodeResult r = random_episode(env, g0, budget_fraction, rng);
      return {r.final_graph, r.connected, r.delta};
    }
    case Method::Kind::Greedy: {
      const GreedyResult r = greedy_episode(g0, budget_fraction, cfg.env().objective, deadline_for(cfg));
      return {r.final_graph, true, r.delta};
    }
    case Method::Kind::Dqn: {
      if (replicate >= models.size()) throw std::invalid_argument("rewire_with: missing model for replicate");
      const EpisodeResult r = greedy_policy_episode(models[replicate], env, g0, budget_fraction);
      return {r.final_graph, r.connected, r.delta};
    }
  }
  throw std::logic_error("rewire_with: unknown method");
}

std::vector<std::string> cmd_generate(const ExperimentConfig& cfg, GraphSet set, std::size_t count,
                                      const std::string& out_dir) {
  ensure_dir(out_dir);
  const int n = cfg.graph.n;
  const auto graphs = make_graph_set(cfg, set, count, n);
  json manifest;
  manifest["set"] = to_string(set);
  manifest["master_seed"] = cfg.master_seed;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  manifest["created"] = stamp;
  manifest["files"] = json::array();
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::ostringstream name;
    name << to_string(set) << '_' << std::setw(4) << std::setfill('0') << i << ".edges";
    const std::string path = join(out_dir, name.str());
    write_edge_list_file(graphs[i], path);
    paths.push_back(path);
    const GeneratorSpec spec = graph_spec(cfg, n, graph_seed(cfg.master_seed, set, i));
    manifest["files"].push_back({{"file", name.str()},
                                 {"model", spec.label()},
                                 {"n", spec.n},
                                 {"attach", spec.attach},
                                 {"k", spec.lattice_k},
                                 {"p", spec.p},
                                 {"seed", spec.seed},
                                 {"edges", graphs[i].num_edges()}});
  }
  write_text(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  return paths;
}

std::vector<ResultRow> cmd_train(const ExperimentConfig& cfg, const std::string& out_dir,
                                 const std::function<void(int, const CurvePoint&)>& progress) {
  cfg.validate();
  ensure_dir(out_dir);
  const auto train_graphs = make_graph_set(cfg, GraphSet::Train, cfg.n_train, cfg.graph.n);
  const auto validation_graphs = make_graph_set(cfg, GraphSet::Validation, cfg.n_validation, cfg.graph.n);
  std::vector<ResultRow> rows;
  for (int s = 0; s < cfg.seeds; ++s) {
    TrainConfig tc = cfg.train;
    tc.budget_fraction = cfg.budget_fraction;
    tc.seed = mix_seed(cfg.master_seed, 0x7A1 + static_cast<std::uint64_t>(s));
    tc.workers = cfg.workers;
    const TrainResult r = train(train_graphs, validation_graphs, cfg.env(), tc, [&](const CurvePoint& c) {
      if (progress) progress(s, c);
    });
    save_checkpoint_file(r.best, join(out_dir, "checkpoint_seed" + std::to_string(s) + ".json"));
    std::ofstream curve(join(out_dir, "curve_seed" + std::to_string(s) + ".csv"));
    if (!curve) throw std::runtime_error("cannot write learning curve in " + out_dir);
    write_curve_csv(curve, r.curve);
    rows.push_back(make_row(cfg, "dqn", cfg.graph.n, cfg.budget_fraction, s, "best_validation", r.best_score));
    rows.push_back(make_row(cfg, "dqn", cfg.graph.n, cfg.budget_fraction, s, "best_step",
                            static_cast<double>(r.best_step)));
  }
  write_results_csv_file(join(out_dir, "train.csv"), rows);
  return rows;
}

EvalSummary cmd_eval(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir,
                     std::vector<ResultRow>* rows_out) {
  cfg.validate();
  const auto models = load_models(method);
  const auto tests = make_graph_set(cfg, GraphSet::Test, cfg.n_test, cfg.graph.n);
  const std::size_t reps = replicate_count(method, cfg);
  std::vector<RewireOutcome> outcomes(reps * tests.size());
  parallel_for(outcomes.size(), cfg.workers, [&](std::size_t k) {
    const std::size_t rep = k / tests.size();
    const std::size_t g = k % tests.size();
    outcomes[k] = rewire_with(method, models, cfg, tests[g], cfg.budget_fraction, replicate_seed(cfg, rep, g), rep);
  });

  std::vector<ResultRow> rows;
  std::vector<double> pooled;
  EvalSummary summary;
  summary.method = method.name();
  summary.graphs = outcomes.size();
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::vector<double> kept;
    std::size_t disconnected = 0;
    for (std::size_t g = 0; g < tests.size(); ++g) {
      const auto& o = outcomes[rep * tests.size() + g];
      if (o.connected) {
        kept.push_back(o.delta);
        pooled.push_back(o.delta);
      } else {
        ++disconnected;
      }
    }
    const Summary s = summarize(kept);
    const long seed = static_cast<long>(rep);
    rows.push_back(make_row(cfg, method.name(), cfg.graph.n, cfg.budget_fraction, seed, "delta_mean", s.mean));
    rows.push_back(make_row(cfg, method.name(), cfg.graph.n, cfg.budget_fraction, seed, "delta_ci95", s.ci95));
    rows.push_back(make_row(cfg, method.name(), cfg.graph.n, cfg.budget_fraction, seed, "disconnected",
                            static_cast<double>(disconnected)));
    summary.disconnected += disconnected;
  }
  summary.delta = summarize(pooled);

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_results_csv_file(join(out_dir, "results.csv"), rows);
    json j = {{"method", summary.method},
              {"objective", to_string(cfg.objective)},
              {"model", model_label(cfg)},
              {"n", cfg.graph.n},
              {"budget_fraction", cfg.budget_fraction},
              {"delta", summary_json(summary.delta)},
              {"disconnected", summary.disconnected},
              {"episodes", summary.graphs}};
    write_text(join(out_dir, "summary.json"), j.dump(2) + "\n");
  }
  if (rows_out) rows_out->insert(rows_out->end(), rows.begin(), rows.end());
  return summary;
}

std::vector<ResultRow> cmd_sweep(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir) {
  if (method.kind == Method::Kind::Greedy) throw std::invalid_argument("greedy is not run in sweeps");
  cfg.validate();
  const auto models = load_models(method);
  const std::size_t reps = replicate_count(method, cfg);
  const auto per_cell = static_cast<std::size_t>(std::max(1, cfg.sweep.graphs_per_cell));
  std::vector<ResultRow> rows;
  std::size_t cell = 0;
  for (int n : cfg.sweep.sizes) {
    // Cells of the same size share graphs so budgets are compared on equal footing.
    std::vector<Graph> graphs(per_cell);
    parallel_for(per_cell, cfg.workers, [&](std::size_t i) {
      graphs[i] = generate(graph_spec(cfg, n, graph_seed(cfg.master_seed, GraphSet::Sweep, cell * per_cell + i)));
    });
    ++cell;
    for (double budget : cfg.sweep.budgets) {
      std::vector<RewireOutcome> outcomes(reps * per_cell);
      parallel_for(outcomes.size(), cfg.workers, [&](std::size_t k) {
        const std::size_t rep = k / per_cell;
        const std::size_t g = k % per_cell;
        outcomes[k] = rewire_with(method, models, cfg, graphs[g], budget, replicate_seed(cfg, rep, g), rep);
      });
      for (std::size_t rep = 0; rep < reps; ++rep) {
        std::vector<double> kept;
        std::size_t disconnected = 0;
        for (std::size_t g = 0; g < per_cell; ++g) {
          const auto& o = outcomes[rep * per_cell + g];
          if (o.connected) {
            kept.push_back(o.delta);
          } else {
            ++disconnected;
          }
        }
        const Summary s = summarize(kept);
        const long seed = static_cast<long>(rep);
        rows.push_back(make_row(cfg, method.name(), n, budget, seed, "delta_mean", s.mean));
        rows.push_back(make_row(cfg, method.name(), n, budget, seed, "delta_ci95", s.ci95));
        rows.push_back(make_row(cfg, method.name(), n, budget, seed, "disconnected", static_cast<double>(disconnected)));
      }
    }
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_results_csv_file(join(out_dir, "sweep.csv"), rows);
  }
  return rows;
}

AttackSummary cmd_attack(const ExperimentConfig& cfg, const Method& method, const std::string& out_dir,
                         std::vector<ResultRow>* rows_out) {
  cfg.validate();
  const auto models = load_models(method);
  std::vector<Graph> graphs;
  EntryRule rule = EntryRule::Synthetic;
  if (!cfg.attack.graph_file.empty()) {
    graphs.push_back(read_edge_list_file(cfg.attack.graph_file));
    rule = EntryRule::AllNodes;
  } else {
    graphs = make_graph_set(cfg, GraphSet::Attack, static_cast<std::size_t>(std::max(0, cfg.attack.graphs)),
                            cfg.attack.n);
  }

  AttackSummary summary;
  summary.method = method.name();
  summary.graphs = graphs.size();
  std::vector<ResultRow> rows;
  std::vector<double> pooled;
  std::ostringstream walks;
  walks << "graph,entry,target,cost\n";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const int n = graphs[i].num_nodes();
    RewireOutcome outcome;
    try {
      outcome = rewire_with(method, models, cfg, graphs[i], cfg.budget_fraction, replicate_seed(cfg, 0, i), 0);
    } catch (const TimeoutError&) {
      summary.infeasible = true;
      break;
    }
    if (!outcome.connected) {
      ++summary.disconnected;
      rows.push_back(make_row(cfg, method.name(), n, cfg.budget_fraction, static_cast<long>(i), "disconnected", 1.0));
      continue;
    }
    const AttackReport report =
        evaluate_rewiring(graphs[i], outcome.final_graph, rule, mix_seed(cfg.master_seed, 0xA77A + i), cfg.workers);
    for (const auto& er : report.entries) {
      pooled.push_back(er.normalized);
      for (const auto& w : er.walks) walks << i << ',' << w.entry << ',' << w.target << ',' << w.cost << '\n';
    }
    rows.push_back(make_row(cfg, method.name(), n, cfg.budget_fraction, static_cast<long>(i), "normalized_cost_mean",
                            report.normalized.mean));
    rows.push_back(make_row(cfg, method.name(), n, cfg.budget_fraction, static_cast<long>(i), "normalized_cost_ci95",
                            report.normalized.ci95));
  }
  summary.normalized = summarize(pooled);
  const int n_label = graphs.empty() ? cfg.attack.n : graphs.front().num_nodes();
  if (summary.infeasible) {
    summary.normalized.mean = std::numeric_limits<double>::infinity();
    rows.clear();
    rows.push_back(make_row(cfg, method.name(), n_label, cfg.budget_fraction, -1, "normalized_cost_mean",
                            summary.normalized.mean));
  } else {
    rows.push_back(make_row(cfg, method.name(), n_label, cfg.budget_fraction, -1, "normalized_cost_mean",
                            summary.normalized.mean));
    rows.push_back(make_row(cfg, method.name(), n_label, cfg.budget_fraction, -1, "normalized_cost_ci95",
                            summary.normalized.ci95));
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_results_csv_file(join(out_dir, "attack.csv"), rows);
    write_text(join(out_dir, "walks.csv"), walks.str());
    json j = {{"method", summary.method},
              {"graphs", summary.graphs},
              {"disconnected", summary.disconnected},
              {"infeasible", summary.infeasible},
              {"normalized_cost", summary_json(summary.normalized)}};
    write_text(join(out_dir, "attack_summary.json"), j.dump(2) + "\n");
  }
  if (rows_out) rows_out->insert(rows_out->end(), rows.begin(), rows.end());
  return summary;
}

std::vector<ResultRow> cmd_timing(const ExperimentConfig& cfg, std::span<const Method> methods,
                                  const std::string& out_dir) {
  std::vector<ResultRow> rows;
  for (const Method& method : methods) {
    const auto models = load_models(method);
    std::size_t index = 0;
    for (int n : cfg.timing.sizes) {
      bool timed_out = false;
      for (int r = 0; r < cfg.timing.repeats; ++r, ++index) {
        double seconds = std::numeric_limits<double>::infinity();
        if (!timed_out) {
          const Graph g = generate(graph_spec(cfg, n, graph_seed(cfg.master_seed, GraphSet::Timing, index)));
          try {
            seconds = time_episode(
                [&] { rewire_with(method, models, cfg, g, cfg.budget_fraction, replicate_seed(cfg, 0, index), 0); });
          } catch (const TimeoutError&) {
            timed_out = true;
          }
        }
        rows.push_back(make_row(cfg, method.name(), n, cfg.budget_fraction, r, "seconds", seconds));
      }
    }
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_results_csv_file(join(out_dir, "timing.csv"), rows);
  }
  return rows;
}

IngestResult cmd_ingest(const std::string& csv_path, const IngestOptions& opts, const std::string& out_dir,
                        const std::string& src_column, const std::string& dst_column) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path);
  const auto events = read_host_events_csv(in, src_column, dst_column);
  IngestResult result = ingest_host_events(events, opts);
  ensure_dir(out_dir);
  write_edge_list_file(result.graph, join(out_dir, "graph.edges"));
  std::ostringstream hosts;
  for (std::size_t i = 0; i < result.hosts.size(); ++i) hosts << i << ' ' << result.hosts[i] << '\n';
  write_text(join(out_dir, "hosts.txt"), hosts.str());
  json j = {{"nodes", result.graph.num_nodes()},
            {"edges", result.graph.num_edges()},
            {"diameter", result.diameter},
            {"events", events.size()},
            {"degree_cap", opts.degree_cap},
            {"leaf_min_neighbors", opts.leaf_filter.min_leaf_neighbors},
            {"leaf_min_fraction", opts.leaf_filter.min_leaf_fraction}};
  write_text(join(out_dir, "summary.json"), j.dump(2) + "\n");
  return result;
}

}  // namespace rewire
