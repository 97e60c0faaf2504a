#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rewire/env.hpp"
#include "rewire/generators.hpp"

using namespace rewire;

namespace {

const EnvConfig kMerw{ObjectiveConfig::defaults(ObjectiveKind::Merw), -10.0};
const EnvConfig kShannon{ObjectiveConfig::defaults(ObjectiveKind::Shannon), -10.0};

}  // namespace

TEST_CASE("budget rounding") {
  CHECK(budget_for(57, 0.15) == 9);
  CHECK(budget_for(60, 0.15) == 9);
  CHECK(budget_for(56, 0.15) == 8);
  CHECK(budget_for(10, 0.01) == 1);
  CHECK(budget_for(10, 0.25) == 3);  // 2.5 rounds up

  const RewireEnv env(kMerw);
  const Graph ws = generate(GeneratorSpec::watts_strogatz(30, 4, 0.0, 0));
  const RewireState s = env.reset(ws, 0.15);
  CHECK(s.budget == 9);
  CHECK(s.horizon() == 27);
  CHECK(s.t == 0);
  CHECK(s.phase() == Phase::SelectBase);
  CHECK(s.f0 == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("reset rejects bad input") {
  const RewireEnv env(kMerw);
  Graph split = oracle::path(4);
  split.remove_edge(1, 2);
  CHECK_THROWS_AS(env.reset(split, 0.15), std::invalid_argument);
  CHECK_THROWS_AS(env.reset(oracle::cycle(5), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(env.reset(oracle::cycle(5), 1.5), std::invalid_argument);
}

TEST_CASE("valid action sets") {
  const RewireEnv env(kMerw);
  SUBCASE("complete graphs have no base node") {
    RewireState s = env.reset(oracle::complete(4), 0.5);
    CHECK(s.terminal);
    s.terminal = false;
    CHECK(valid_actions(s).empty());
  }
  SUBCASE("addition excludes the base and its neighbours") {
    RewireState s = env.reset(oracle::path(3), 0.5);
    s = env.step(s, 0).next_state;
    CHECK(valid_actions(s) == std::vector<Node>{2});
  }
  SUBCASE("removal excludes the just-added node") {
    Graph g = oracle::complete(3);
    g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}});
    RewireState s = env.reset(g, 0.25);
    s = env.step(s, 0).next_state;
    s = env.step(s, 3).next_state;
    CHECK(s.graph.has_edge(0, 3));
    CHECK(valid_actions(s) == std::vector<Node>{1, 2});
  }
}

TEST_CASE("enumerate_rewirings") {
  CHECK(enumerate_rewirings(oracle::path(3)) == std::vector<Rewiring>{{0, 2, 1}, {2, 0, 1}});
  CHECK(enumerate_rewirings(oracle::complete(3)).empty());
  const auto c4 = enumerate_rewirings(oracle::cycle(4));
  CHECK(c4.size() == 8);
  CHECK(std::is_sorted(c4.begin(), c4.end()));
}

TEST_CASE("enumerate_rewirings matches the three action sets applied in sequence") {
  const RewireEnv env(kMerw);
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_connected_graph(8, 0.2, rng);
    std::vector<Rewiring> walked;
    const RewireState s0 = env.reset(g, 0.1);
    for (Node a : valid_actions(s0)) {
      const RewireState s1 = env.step(s0, a).next_state;
      for (Node b : valid_actions(s1)) {
        const RewireState s2 = env.step(s1, b).next_state;
        for (Node c : valid_actions(s2)) walked.push_back({a, b, c});
      }
    }
    CHECK(walked == enumerate_rewirings(g));
  }
}

TEST_CASE("single rewiring on C4 under MERW") {
  const RewireEnv env(kMerw);
  RewireState s = env.reset(oracle::cycle(4), 0.25);
  REQUIRE(s.budget == 1);
  auto o1 = env.step(s, 0);
  CHECK(o1.reward == 0.0);
  CHECK_FALSE(o1.terminal);
  CHECK(o1.next_state.base == 0);
  CHECK(o1.next_state.graph.num_edges() == 4);
  auto o2 = env.step(o1.next_state, 2);
  CHECK(o2.reward == 0.0);
  CHECK(o2.next_state.graph.num_edges() == 5);
  auto o3 = env.step(o2.next_state, 1);
  CHECK(o3.terminal);
  const Graph& g = o3.next_state.graph;
  CHECK(g.num_edges() == 4);
  CHECK(g.has_edge(0, 2));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK(is_connected(g));
  const double expected = 10.0 * (std::log(oracle::dense_spectral_radius(g)) - std::log(2.0));
  CHECK(std::abs(o3.reward - expected) < 1e-9);
  CHECK_FALSE(o3.next_state.base.has_value());
  CHECK_THROWS_AS(env.step(o3.next_state, 0), std::invalid_argument);
}

TEST_CASE("disconnected final graph gets the penalty") {
  const RewireEnv env(kShannon);
  RewireState s = env.reset(oracle::path(4), 0.34);
  REQUIRE(s.budget == 1);
  s = env.step(s, 1).next_state;
  s = env.step(s, 3).next_state;
  const auto out = env.step(s, 0);
  CHECK(out.terminal);
  CHECK(out.reward == -10.0);
}

TEST_CASE("illegal actions are rejected") {
  const RewireEnv env(kMerw);
  RewireState s = env.reset(oracle::path(3), 0.5);
  CHECK_THROWS_AS(env.step(s, 1), std::invalid_argument);
  CHECK_THROWS_AS(env.step(s, 7), std::invalid_argument);
  s = env.step(s, 0).next_state;
  CHECK_THROWS_AS(env.step(s, 1), std::invalid_argument);
}

TEST_CASE("random episodes respect the MDP invariants") {
  std::mt19937_64 rng(31);
  for (const auto& cfg : {kMerw, kShannon}) {
    const RewireEnv env(cfg);
    for (int trial = 0; trial < 60; ++trial) {
      const char* labels[] = {"BA-1", "BA-2", "WS", "ER"};
      const Graph g0 = generate(spec_from_label(labels[trial % 4], 30, static_cast<std::uint64_t>(trial)));
      const std::size_t m = g0.num_edges();
      RewireState s = env.reset(g0, 0.15);
      double total = 0.0;
      int steps = 0;
      while (!s.terminal) {
        const auto actions = valid_actions(s);
        REQUIRE_FALSE(actions.empty());
        const Phase phase = s.phase();
        const auto out = env.step(s, actions[rng() % actions.size()]);
        ++steps;
        if (phase == Phase::SelectAddition) CHECK(out.next_state.graph.num_edges() == m + 1);
        if (phase == Phase::SelectRemoval) CHECK(out.next_state.graph.num_edges() == m);
        if (!out.terminal) CHECK(out.reward == 0.0);
        CHECK(out.next_state.graph.num_nodes() == 30);
        total += out.reward;
        s = out.next_state;
      }
      CHECK(steps == s.horizon());
      const double expected = is_connected(s.graph)
                                  ? cfg.objective.reward_scale * (evaluate(cfg.objective, s.graph) -
                                                                  evaluate(cfg.objective, g0))
                                  : -10.0;
      CHECK(std::abs(total - expected) < 1e-9);
    }
  }
}

TEST_CASE("transitions are deterministic") {
  const RewireEnv env(kMerw);
  const Graph g0 = generate(GeneratorSpec::barabasi_albert(30, 2, 4));
  const RewireState s = env.reset(g0, 0.15);
  const auto a = env.step(s, 5);
  const auto b = env.step(s, 5);
  CHECK(a.next_state.graph == b.next_state.graph);
  CHECK(a.next_state.base == b.next_state.base);
}

TEST_CASE("run_episode and trace export") {
  const RewireEnv env(kMerw);
  const auto r = run_episode(env, oracle::cycle(4), 0.25,
                             [](const RewireState&, std::span<const Node> acts) { return acts.front(); });
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].action == 0);
  CHECK(r.trace[1].action == 2);
  CHECK(r.trace[2].action == 1);
  CHECK(r.connected);
  CHECK(std::abs(r.total_reward - 10.0 * r.delta) < 1e-12);
  std::ostringstream csv;
  write_trace_csv(csv, r.trace);
  CHECK(csv.str().rfind("t,phase,action,reward\n0,0,0,0\n1,1,2,0\n2,2,1,", 0) == 0);

  const auto stuck = run_episode(env, oracle::complete(5), 0.15,
                                 [](const RewireState&, std::span<const Node> acts) { return acts.front(); });
  CHECK(stuck.trace.empty());
  CHECK(stuck.delta == 0.0);
  CHECK(stuck.final_graph == oracle::complete(5));
}
