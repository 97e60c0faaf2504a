#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "rewire/baselines.hpp"
#include "rewire/experiment.hpp"

using namespace rewire;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory, removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("rewire_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg = default_config(ObjectiveKind::Merw, "BA-2");
  cfg.graph.n = 12;
  cfg.n_train = 6;
  cfg.n_validation = 4;
  cfg.n_test = 5;
  cfg.seeds = 2;
  cfg.master_seed = 42;
  cfg.train.total_steps = 60;
  cfg.train.eps_decay_steps = 30;
  cfg.train.batch_size = 8;
  cfg.train.target_sync_every = 10;
  cfg.train.validation_every = 30;
  cfg.train.replay_capacity = 100;
  cfg.train.embedding_dim = 8;
  cfg.train.rounds = 2;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REWIRE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("graph set seeds never collide") {
  std::unordered_set<std::uint64_t> seen;
  for (GraphSet set : {GraphSet::Train, GraphSet::Validation, GraphSet::Test, GraphSet::Sweep, GraphSet::Attack,
                       GraphSet::Timing}) {
    for (std::size_t i = 0; i < 2000; ++i) CHECK(seen.insert(graph_seed(7, set, i)).second);
  }
  CHECK(graph_seed(7, GraphSet::Test, 3) == graph_seed(7, GraphSet::Test, 3));
  CHECK(graph_seed(7, GraphSet::Test, 3) != graph_seed(8, GraphSet::Test, 3));
  CHECK(to_string(GraphSet::Validation) == "validation");

  const ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  const auto train = make_graph_set(cfg, GraphSet::Train, 20, 30);
  const auto test = make_graph_set(cfg, GraphSet::Test, 20, 30);
  for (const auto& a : train) {
    CHECK(is_connected(a));
    for (const auto& b : test) CHECK_FALSE(a == b);
  }
  CHECK(make_graph_set(cfg, GraphSet::Test, 20, 30) == test);
}

TEST_CASE("configuration validation") {
  auto broken = [](auto edit) {
    ExperimentConfig cfg;
    edit(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(broken([](auto& c) { c.budget_fraction = 0.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.budget_fraction = 1.5; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.seeds = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.workers = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.timeout_seconds = -1; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.sweep.budgets = {0.1, 2.0}; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.sweep.sizes = {2}; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.n_train = std::size_t{1} << 41; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.graph.n = 1; }).validate(), std::invalid_argument);
}

TEST_CASE("hyperparameters per objective and family") {
  const auto merw_ba2 = default_hyperparams(ObjectiveKind::Merw, "BA-2");
  CHECK(merw_ba2.rounds == 3);
  CHECK(merw_ba2.learning_rate == 5e-4);
  CHECK(merw_ba2.embedding_dim == 128);
  const auto shannon_ba2 = default_hyperparams(ObjectiveKind::Shannon, "BA-2");
  CHECK(shannon_ba2.learning_rate == 1e-3);
  CHECK(shannon_ba2.embedding_dim == 64);
  CHECK(default_hyperparams(ObjectiveKind::Merw, "BA-1").rounds == 6);
  CHECK(default_hyperparams(ObjectiveKind::Merw, "ER").rounds == 4);
  CHECK(default_hyperparams(ObjectiveKind::Shannon, "ER").learning_rate == 1e-4);
  CHECK(default_hyperparams(ObjectiveKind::Shannon, "WS").rounds == 6);
  CHECK(default_hyperparams(ObjectiveKind::Shannon, "WS").learning_rate == 1e-3);
  CHECK_THROWS_AS(default_hyperparams(ObjectiveKind::Merw, "grid"), std::invalid_argument);

  const auto cfg = default_config(ObjectiveKind::Shannon, "WS");
  CHECK(cfg.train.rounds == 6);
  CHECK(cfg.train.embedding_dim == 64);
  CHECK(cfg.graph.label() == "WS");
  CHECK(cfg.graph.n == 30);
}

TEST_CASE("JSON configuration") {
  std::istringstream in(R"({
    "objective": "shannon",
    "graph": {"model": "ER", "n": 20, "p": 0.2},
    "data": {"n_train": 10, "n_validation": 3, "n_test": 4},
    "budget_fraction": 0.2,
    "seeds": 3,
    "master_seed": 9,
    "timeout": 2.5,
    "train": {"total_steps": 500, "batch_size": 16, "validation_every": 100},
    "sweep": {"sizes": [10, 20], "budgets": [0.1], "graphs_per_cell": 4},
    "attack": {"n": 50, "graphs": 2},
    "timing": {"sizes": [10], "repeats": 1}
  })");
  const ExperimentConfig cfg = parse_config(in);
  CHECK(cfg.objective == ObjectiveKind::Shannon);
  CHECK(cfg.graph.label() == "ER");
  CHECK(cfg.graph.n == 20);
  CHECK(cfg.graph.p == 0.2);
  CHECK(cfg.n_train == 10);
  CHECK(cfg.n_test == 4);
  CHECK(cfg.budget_fraction == 0.2);
  CHECK(cfg.seeds == 3);
  CHECK(cfg.master_seed == 9);
  CHECK(cfg.timeout_seconds == 2.5);
  CHECK(cfg.train.total_steps == 500);
  CHECK(cfg.train.batch_size == 16);
  CHECK(cfg.train.eps_end == 0.1);
  CHECK(cfg.train.rounds == 4);
  CHECK(cfg.train.learning_rate == 1e-4);
  CHECK(cfg.sweep.sizes == std::vector<int>{10, 20});
  CHECK(cfg.attack.n == 50);
  CHECK(cfg.timing.repeats == 1);

  std::istringstream again(config_to_json(cfg));
  const ExperimentConfig round = parse_config(again);
  CHECK(config_to_json(round) == config_to_json(cfg));

  std::istringstream empty("{}");
  CHECK(config_to_json(parse_config(empty)) == config_to_json(ExperimentConfig{}));
  std::istringstream bad("{\"seeds\": ");
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
  std::istringstream wrong_type("{\"seeds\": \"many\"}");
  CHECK_THROWS_AS(parse_config(wrong_type), std::invalid_argument);
  std::istringstream family("{\"graph\": {\"model\": \"lattice\"}}");
  CHECK_THROWS_AS(parse_config(family), std::invalid_argument);
  CHECK_THROWS(load_config_file("/nonexistent/config.json"));
}

TEST_CASE("result rows as CSV") {
  const std::vector<ResultRow> rows{{"random", "MERW", "BA-2", 30, 0.15, 0, "delta_mean", -0.019},
                                    {"greedy", "Shannon", "WS", 30, 0.15, 1, "seconds",
                                     std::numeric_limits<double>::infinity()}};
  std::ostringstream out;
  write_results_csv(out, rows);
  CHECK(out.str() ==
        "method,objective,model,n,budget_fraction,seed,metric,value\n"
        "random,MERW,BA-2,30,0.15,0,delta_mean,-0.019\n"
        "greedy,Shannon,WS,30,0.15,1,seconds,inf\n");
}

TEST_CASE("method parsing") {
  CHECK(parse_method("random").kind == Method::Kind::Random);
  CHECK(parse_method("greedy").name() == "greedy");
  CHECK(parse_method("noop").kind == Method::Kind::Noop);
  const Method m = parse_method("dqn:a.json,b.json");
  CHECK(m.kind == Method::Kind::Dqn);
  CHECK(m.checkpoints == std::vector<std::string>{"a.json", "b.json"});
  CHECK(parse_method("model.json").checkpoints == std::vector<std::string>{"model.json"});
  CHECK(parse_method("dqn").name() == "dqn");
  CHECK_THROWS_AS(parse_method("dqn:"), std::invalid_argument);
  CHECK(load_models(parse_method("random")).empty());
  CHECK_THROWS(load_models(parse_method("dqn:/nonexistent.json")));
}

TEST_CASE("generate writes seeded edge lists with a manifest") {
  const TempDir a("gen_a");
  const TempDir b("gen_b");
  const ExperimentConfig cfg = small_config();
  const auto paths = cmd_generate(cfg, GraphSet::Test, 3, a.path.string());
  cmd_generate(cfg, GraphSet::Test, 3, b.path.string());
  REQUIRE(paths.size() == 3);
  const auto graphs = make_graph_set(cfg, GraphSet::Test, 3, cfg.graph.n);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(read_edge_list_file(paths[i]) == graphs[i]);
    const std::string name = fs::path(paths[i]).filename().string();
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(fs::path(paths[0]).filename() == "test_0000.edges");
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["files"].size() == 3);
  CHECK(manifest["files"][1]["seed"].get<std::uint64_t>() == graph_seed(cfg.master_seed, GraphSet::Test, 1));
  CHECK(manifest["files"][1]["model"] == "BA-2");
}

TEST_CASE("evaluation of baselines") {
  const TempDir dir("eval");
  ExperimentConfig cfg = small_config();

  std::vector<ResultRow> rows;
  const EvalSummary noop = cmd_eval(cfg, parse_method("noop"), dir.path.string(), &rows);
  CHECK(noop.delta.mean == 0.0);
  CHECK(noop.graphs == 5);
  CHECK(rows.size() == 3);
  CHECK(lines(slurp(dir / "results.csv")).size() == 4);
  CHECK(fs::exists(dir / "summary.json"));

  const EvalSummary random = cmd_eval(cfg, parse_method("random"), "");
  CHECK(random.graphs == 5 * static_cast<std::size_t>(cfg.seeds));
  CHECK(random.delta.count + random.disconnected == random.graphs);

  const EvalSummary greedy = cmd_eval(cfg, parse_method("greedy"), "");
  CHECK(greedy.graphs == 5);
  CHECK(greedy.disconnected == 0);
  CHECK(greedy.delta.mean > random.delta.mean);

  cfg.timeout_seconds = 1e-9;
  cfg.graph.n = 30;
  CHECK_THROWS_AS(cmd_eval(cfg, parse_method("greedy"), ""), TimeoutError);
}

TEST_CASE("results do not depend on the worker count") {
  const TempDir one("w1");
  const TempDir three("w3");
  ExperimentConfig cfg = small_config();
  cmd_eval(cfg, parse_method("random"), one.path.string());
  cfg.workers = 3;
  cmd_eval(cfg, parse_method("random"), three.path.string());
  CHECK(slurp(one / "results.csv") == slurp(three / "results.csv"));
}

TEST_CASE("sweeps emit one row triple per replicate and cell") {
  ExperimentConfig cfg = small_config();
  cfg.sweep.sizes = {10, 12, 14};
  cfg.sweep.budgets = {0.1, 0.2, 0.3};
  cfg.sweep.graphs_per_cell = 3;
  const TempDir dir("sweep");
  const auto rows = cmd_sweep(cfg, parse_method("random"), dir.path.string());
  CHECK(rows.size() == 3 * 3 * static_cast<std::size_t>(cfg.seeds) * 3);
  CHECK(lines(slurp(dir / "sweep.csv")).size() == rows.size() + 1);
  for (const auto& r : rows) {
    CHECK(r.method == "random");
    CHECK((r.metric == "delta_mean" || r.metric == "delta_ci95" || r.metric == "disconnected"));
  }
  CHECK(cmd_sweep(cfg, parse_method("noop"), "").size() == 3 * 3 * 3);
  CHECK_THROWS_AS(cmd_sweep(cfg, parse_method("greedy"), ""), std::invalid_argument);
}

TEST_CASE("attack command") {
  ExperimentConfig cfg = small_config();
  cfg.attack.n = 40;
  cfg.attack.graphs = 3;
  const TempDir dir("attack");
  const AttackSummary noop = cmd_attack(cfg, parse_method("noop"), dir.path.string());
  CHECK(noop.graphs == 3);
  CHECK(noop.normalized.mean == 0.0);
  CHECK(noop.normalized.count == 90);
  CHECK(lines(slurp(dir / "walks.csv")).size() == 1);

  const AttackSummary random = cmd_attack(cfg, parse_method("random"), dir.path.string());
  CHECK(random.normalized.mean > 0.0);
  CHECK(lines(slurp(dir / "walks.csv")).size() > 1);
  const auto summary = nlohmann::json::parse(slurp(dir / "attack_summary.json"));
  CHECK(summary["method"] == "random");

  const std::string file = dir / "host.edges";
  write_edge_list_file(generate(GeneratorSpec::barabasi_albert(20, 2, 5)), file);
  cfg.attack.graph_file = file;
  const AttackSummary host = cmd_attack(cfg, parse_method("noop"), "");
  CHECK(host.graphs == 1);
  CHECK(host.normalized.count == 20);

  cfg.attack.graph_file.clear();
  cfg.attack.n = 30;
  cfg.timeout_seconds = 1e-9;
  const AttackSummary late = cmd_attack(cfg, parse_method("greedy"), "");
  CHECK(late.infeasible);
  CHECK(std::isinf(late.normalized.mean));
}

TEST_CASE("training writes checkpoints that evaluation can load") {
  const TempDir a("train_a");
  const TempDir b("train_b");
  ExperimentConfig cfg = small_config();
  const auto rows = cmd_train(cfg, a.path.string());
  cmd_train(cfg, b.path.string());
  CHECK(rows.size() == 4);
  for (const char* name : {"train.csv", "curve_seed0.csv", "curve_seed1.csv", "checkpoint_seed0.json"}) {
    CHECK(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(lines(slurp(a / "curve_seed0.csv")).size() == 3);

  const Method dqn = parse_method("dqn:" + (a / "checkpoint_seed0.json") + "," + (a / "checkpoint_seed1.json"));
  CHECK(load_models(dqn).size() == 2);
  const EvalSummary eval = cmd_eval(cfg, dqn, "");
  CHECK(eval.graphs == 2 * cfg.n_test);
}

TEST_CASE("timing rows per method, size and repeat") {
  ExperimentConfig cfg = small_config();
  cfg.timing.sizes = {10, 14};
  cfg.timing.repeats = 2;
  const std::vector<Method> methods{parse_method("random"), parse_method("greedy")};
  const TempDir dir("timing");
  const auto rows = cmd_timing(cfg, methods, dir.path.string());
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.metric == "seconds");
    CHECK(r.value >= 0.0);
    CHECK(std::isfinite(r.value));
  }
  cfg.timeout_seconds = 1e-9;
  cfg.timing.sizes = {30};
  const std::vector<Method> greedy{parse_method("greedy")};
  for (const auto& r : cmd_timing(cfg, greedy, "")) CHECK(std::isinf(r.value));
}

TEST_CASE("ingest command writes the host graph") {
  const TempDir dir("ingest");
  {
    std::ofstream csv(dir / "events.csv");
    csv << "Time,SrcDevice,DstDevice\n";
    const char* ring[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i) {
      csv << i << ',' << ring[i] << ',' << ring[(i + 1) % 4] << '\n';
      csv << i << ',' << ring[(i + 1) % 4] << ',' << ring[i] << '\n';
    }
    csv << "9,a,z\n";
  }
  const auto r = cmd_ingest(dir / "events.csv", {}, dir / "out");
  CHECK(r.graph.num_nodes() == 4);
  CHECK(r.graph.num_edges() == 4);
  CHECK(read_edge_list_file(dir / "out/graph.edges") == r.graph);
  CHECK(lines(slurp(dir / "out/hosts.txt")).size() == 4);
  CHECK(nlohmann::json::parse(slurp(dir / "out/summary.json"))["diameter"] == 2);
}

TEST_CASE("command-line exit codes") {
  const TempDir dir("cli");
  const std::string out = " --out " + dir.path.string();
  CHECK(run_cli("") == 1);
  CHECK(run_cli("--bogus generate") == 1);
  CHECK(run_cli(out + " generate --set nowhere") == 1);
  CHECK(run_cli(out + " --n 10 generate --set test --count 2") == 0);
  CHECK(fs::exists(dir / "test_0001.edges"));
  CHECK(run_cli(out + " eval --method dqn:/nonexistent.json") == 2);
  CHECK(run_cli(out + " --timeout 0.000000001 eval --method greedy") == 3);
  CHECK(run_cli(out + " --n 10 --seed 3 eval --method noop") == 0);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(run_cli(out + " --budget 2 eval") == 1);
}
