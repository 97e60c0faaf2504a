#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rewire/baselines.hpp"
#include "rewire/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitTimeout = 3;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
  int workers = 1;
  double timeout = 0.0;
  std::string objective;
  std::string model;
  int n = 0;
  double budget = 0.0;
};

rewire::ExperimentConfig resolve_config(const GlobalOptions& g, const CLI::App& app) {
  rewire::ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = rewire::load_config_file(g.config);
  }
  if (!g.objective.empty() || !g.model.empty()) {
    // Family or objective changes reset the hyperparameter defaults.
    const auto kind = g.objective.empty() ? cfg.objective : rewire::parse_objective(g.objective);
    const std::string label = g.model.empty() ? cfg.graph.label() : g.model;
    const auto fresh = rewire::default_config(kind, label);
    cfg.objective = kind;
    cfg.graph = fresh.graph;
    cfg.train.learning_rate = fresh.train.learning_rate;
    cfg.train.rounds = fresh.train.rounds;
    cfg.train.embedding_dim = fresh.train.embedding_dim;
  }
  if (app.count("--seed")) cfg.master_seed = g.seed;
  if (app.count("--workers")) cfg.workers = g.workers;
  if (app.count("--timeout")) cfg.timeout_seconds = g.timeout;
  if (g.n > 0) cfg.graph.n = g.n;
  if (g.budget > 0) cfg.budget_fraction = g.budget;
  return cfg;
}

void print_summary(const rewire::EvalSummary& s) {
  std::cout << s.method << ": delta " << s.delta.mean << " +- " << s.delta.ci95 << " over " << s.delta.count
            << " connected finals, " << s.disconnected << " disconnected\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph rewiring for entropy maximisation: data, training, evaluation and attack simulation"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--config", g.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--timeout", g.timeout, "Greedy deadline in seconds (0 = none)")->check(CLI::NonNegativeNumber);
  app.add_option("--objective", g.objective, "shannon or merw");
  app.add_option("--model", g.model, "Graph family: BA-1, BA-2, WS, ER");
  app.add_option("--n", g.n, "Graph size")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "Budget as a fraction of the edge count")->check(CLI::Range(0.0, 1.0));

  auto* generate = app.add_subcommand("generate", "Write a seeded graph set with a manifest");
  std::string set_name = "test";
  std::size_t count = 0;
  generate->add_option("--set", set_name, "train, validation, test, sweep, attack or timing");
  generate->add_option("--count", count, "Number of graphs (defaults to the set size)");

  auto* train = app.add_subcommand("train", "Train one DQN per seed");
  long steps = 0;
  int seeds = 0;
  train->add_option("--steps", steps, "Total environment steps per seed");
  train->add_option("--seeds", seeds, "Number of training seeds");

  std::string method_text = "random";
  auto* eval = app.add_subcommand("eval", "Score a method on the test set");
  eval->add_option("--method", method_text, "random, greedy, noop or checkpoint path(s)");

  auto* sweep = app.add_subcommand("sweep", "Evaluate across graph sizes and budgets");
  std::vector<int> sizes;
  std::vector<double> budgets;
  sweep->add_option("--method", method_text, "random, noop or checkpoint path(s)");
  sweep->add_option("--sizes", sizes, "Graph sizes");
  sweep->add_option("--budgets", budgets, "Budget fractions");

  auto* attack = app.add_subcommand("attack", "Random-walk attack cost after rewiring");
  std::string graph_file;
  int attack_n = 0;
  int attack_graphs = 0;
  attack->add_option("--method", method_text, "random, greedy, noop or checkpoint path(s)");
  attack->add_option("--graph", graph_file, "Edge list to attack (every node is an entry)")->check(CLI::ExistingFile);
  attack->add_option("--attack-n", attack_n, "Size of generated attack graphs");
  attack->add_option("--graphs", attack_graphs, "Number of generated attack graphs");

  auto* timing = app.add_subcommand("timing", "Wall-clock time per rewiring episode");
  std::vector<std::string> methods{"greedy", "random"};
  timing->add_option("--methods", methods, "Methods to time");
  timing->add_option("--sizes", sizes, "Graph sizes");

  auto* ingest = app.add_subcommand("ingest", "Build a host graph from an event log");
  std::string input;
  std::string src_col;
  std::string dst_col;
  rewire::IngestOptions ingest_opts;
  ingest->add_option("--input", input, "Event CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--src-column", src_col, "Source host column");
  ingest->add_option("--dst-column", dst_col, "Destination host column");
  ingest->add_option("--degree-cap", ingest_opts.degree_cap, "Drop nodes above this degree");
  ingest->add_option("--leaf-min", ingest_opts.leaf_filter.min_leaf_neighbors, "Leaf neighbours marking a hub");
  ingest->add_option("--leaf-fraction", ingest_opts.leaf_filter.min_leaf_fraction, "Leaf share marking a hub");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    rewire::ExperimentConfig cfg = resolve_config(g, app);

    if (*generate) {
      const std::vector<std::pair<std::string, rewire::GraphSet>> sets{
          {"train", rewire::GraphSet::Train},   {"validation", rewire::GraphSet::Validation},
          {"test", rewire::GraphSet::Test},     {"sweep", rewire::GraphSet::Sweep},
          {"attack", rewire::GraphSet::Attack}, {"timing", rewire::GraphSet::Timing}};
      auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& p) { return p.first == set_name; });
      if (it == sets.end()) {
        std::cerr << "unknown set '" << set_name << "'\n";
        return kExitUsage;
      }
      if (count == 0) {
        count = it->second == rewire::GraphSet::Train        ? cfg.n_train
                : it->second == rewire::GraphSet::Validation ? cfg.n_validation
                                                             : cfg.n_test;
      }
      const auto paths = rewire::cmd_generate(cfg, it->second, count, g.out);
      std::cout << "wrote " << paths.size() << " graphs to " << g.out << '\n';
    } else if (*train) {
      if (steps > 0) cfg.train.total_steps = steps;
      if (seeds > 0) cfg.seeds = seeds;
      const auto rows = rewire::cmd_train(cfg, g.out, [](int seed, const rewire::CurvePoint& c) {
        std::cerr << "seed " << seed << " step " << c.step << " validation " << c.validation_mean << " best "
                  << c.best_so_far << '\n';
      });
      rewire::write_results_csv(std::cout, rows);
    } else if (*eval) {
      print_summary(rewire::cmd_eval(cfg, rewire::parse_method(method_text), g.out));
    } else if (*sweep) {
      if (!sizes.empty()) cfg.sweep.sizes = sizes;
      if (!budgets.empty()) cfg.sweep.budgets = budgets;
      const auto rows = rewire::cmd_sweep(cfg, rewire::parse_method(method_text), g.out);
      std::cout << "wrote " << rows.size() << " rows to " << g.out << "/sweep.csv\n";
    } else if (*attack) {
      if (!graph_file.empty()) cfg.attack.graph_file = graph_file;
      if (attack_n > 0) cfg.attack.n = attack_n;
      if (attack_graphs > 0) cfg.attack.graphs = attack_graphs;
      const auto s = rewire::cmd_attack(cfg, rewire::parse_method(method_text), g.out);
      if (s.infeasible) {
        std::cout << s.method << ": infeasible (timeout)\n";
      } else {
        std::cout << s.method << ": normalized cost " << s.normalized.mean << " +- " << s.normalized.ci95 << " ("
                  << s.disconnected << " disconnected of " << s.graphs << ")\n";
      }
    } else if (*timing) {
      if (!sizes.empty()) cfg.timing.sizes = sizes;
      std::vector<rewire::Method> parsed;
      for (const auto& m : methods) parsed.push_back(rewire::parse_method(m));
      rewire::write_results_csv(std::cout, rewire::cmd_timing(cfg, parsed, g.out));
    } else if (*ingest) {
      const auto r = rewire::cmd_ingest(input, ingest_opts, g.out, src_col, dst_col);
      std::cout << "nodes " << r.graph.num_nodes() << " edges " << r.graph.num_edges() << " diameter " << r.diameter
                << '\n';
    }
  } catch (const rewire::TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << '\n';
    return kExitTimeout;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
