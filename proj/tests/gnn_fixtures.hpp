#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "rewire/env.hpp"
#include "rewire/generators.hpp"
#include "rewire/gnn.hpp"

// Shared fixtures for the value-network tests and the acceptance run.
namespace fixtures {

using namespace rewire;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline const RewireEnv kEnv({ObjectiveConfig::defaults(ObjectiveKind::Merw), -10.0});

// Dense reference forward pass written directly from the model equations.
inline MatrixXd oracle_embed(const RewireState& s, const ModelParams& p) {
  const MatrixXd a = oracle::adjacency(s.graph);
  const MatrixXd x = node_features(s);
  MatrixXd mu = MatrixXd::Zero(p.embedding_dim, s.graph.num_nodes());
  for (int l = 0; l < p.rounds; ++l) mu = (p.lift * x + p.aggregate * mu * a).cwiseMax(0.0);
  return mu;
}

inline VectorXd oracle_input(const RewireState& s, const MatrixXd& mu, Node action) {
  const int d = static_cast<int>(mu.rows());
  const int head = static_cast<int>(s.phase());
  VectorXd z((head + 2) * d);
  int block = 0;
  if (head >= 1) z.segment(d * block++, d) = mu.col(*s.base);
  if (head >= 2) z.segment(d * block++, d) = mu.col(*s.addition);
  z.segment(d * block++, d) = mu.col(action);
  z.segment(d * block, d) = mu.rowwise().sum();
  return z;
}

inline std::vector<double> oracle_values(const ModelParams& p, const std::vector<const RewireState*>& states,
                                  const std::vector<QQuery>& queries, NormMode mode) {
  std::vector<double> out(queries.size());
  for (int k = 0; k < kNumHeads; ++k) {
    const QHead& h = p.heads[static_cast<std::size_t>(k)];
    std::vector<std::size_t> members;
    std::vector<VectorXd> hidden;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const RewireState& s = *states[queries[q].state];
      if (static_cast<int>(s.phase()) != k) continue;
      members.push_back(q);
      hidden.push_back((h.hidden * oracle_input(s, oracle_embed(s, p), queries[q].action)).cwiseMax(0.0));
    }
    if (members.empty()) continue;
    VectorXd mean = h.running_mean.col(0);
    VectorXd var = h.running_var.col(0);
    if (mode == NormMode::Train) {
      mean.setZero();
      for (const auto& v : hidden) mean += v;
      mean /= static_cast<double>(hidden.size());
      var.setZero();
      for (const auto& v : hidden) var += (v - mean).cwiseAbs2();
      var /= static_cast<double>(hidden.size());
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      const VectorXd xhat = ((hidden[i] - mean).array() / (var.array() + kBatchNormEps).sqrt()).matrix();
      const VectorXd y = (xhat.array() * h.bn_scale.col(0).array() + h.bn_shift.col(0).array()).matrix();
      out[members[i]] = (h.output * y)(0, 0);
    }
  }
  return out;
}

struct Batch {
  std::vector<RewireState> storage;
  std::vector<const RewireState*> states;
  std::vector<QQuery> queries;
};

// States from every phase on small graphs, several queries per state.
inline Batch make_batch(std::uint64_t seed, int graphs, int n, std::size_t per_state = 3) {
  Batch b;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < graphs; ++i) {
    const Graph g = generate(GeneratorSpec::erdos_renyi(n, 0.35, seed * 100 + static_cast<std::uint64_t>(i)));
    RewireState s = kEnv.reset(g, 0.3);
    const int phase = i % 3;
    for (int t = 0; t < phase; ++t) {
      const auto acts = valid_actions(s);
      s = kEnv.step(s, acts[rng() % acts.size()]).next_state;
    }
    b.storage.push_back(s);
  }
  for (std::size_t i = 0; i < b.storage.size(); ++i) {
    b.states.push_back(&b.storage[i]);
    const auto acts = valid_actions(b.storage[i]);
    for (std::size_t j = 0; j < std::min(acts.size(), per_state); ++j) b.queries.push_back({i, acts[j]});
  }
  return b;
}

// Non-trivial batch-norm state so eval mode is not an identity transform.
inline void perturb_norm(ModelParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (auto& h : p.heads) {
    for (Eigen::Index i = 0; i < h.bn_scale.rows(); ++i) {
      h.bn_scale(i, 0) = u(rng);
      h.bn_shift(i, 0) = u(rng) - 1.0;
      h.running_mean(i, 0) = u(rng) - 0.5;
      h.running_var(i, 0) = u(rng);
    }
  }
}

// Smallest distance of any ReLU input to its kink, relative to how far a
// parameter step of size h can move it. Finite differences are only
// meaningful when every ratio stays well above 1.
inline double kink_margin(const ModelParams& p, const Batch& b, double h) {
  double margin = std::numeric_limits<double>::infinity();
  for (const RewireState* s : b.states) {
    const MatrixXd a = oracle::adjacency(s->graph);
    const MatrixXd x = node_features(*s);
    MatrixXd mu = MatrixXd::Zero(p.embedding_dim, s->graph.num_nodes());
    for (int l = 0; l < p.rounds; ++l) {
      const MatrixXd agg = mu * a;
      const MatrixXd pre = p.lift * x + p.aggregate * agg;
      const double reach = h * std::max(1.0, agg.cwiseAbs().maxCoeff()) * p.rounds;
      margin = std::min(margin, pre.cwiseAbs().minCoeff() / reach);
      mu = pre.cwiseMax(0.0);
    }
  }
  // Batch norm bends on the scale of the per-unit batch deviation.
  for (int k = 0; k < kNumHeads; ++k) {
    const QHead& head = p.heads[static_cast<std::size_t>(k)];
    std::vector<VectorXd> hidden;
    double step = 0.0;
    for (const auto& q : b.queries) {
      const RewireState& s = *b.states[q.state];
      if (static_cast<int>(s.phase()) != k) continue;
      const VectorXd z = oracle_input(s, oracle_embed(s, p), q.action);
      const VectorXd pre = head.hidden * z;
      const double move = h * std::max(1.0, z.cwiseAbs().maxCoeff());
      step = std::max(step, move);
      margin = std::min(margin, pre.cwiseAbs().minCoeff() / move);
      hidden.push_back(pre.cwiseMax(0.0));
    }
    if (hidden.empty()) continue;
    VectorXd mean = VectorXd::Zero(kHiddenDim);
    for (const auto& v : hidden) mean += v;
    mean /= static_cast<double>(hidden.size());
    VectorXd var = VectorXd::Zero(kHiddenDim);
    for (const auto& v : hidden) var += (v - mean).cwiseAbs2();
    var /= static_cast<double>(hidden.size());
    for (Eigen::Index j = 0; j < kHiddenDim; ++j) {
      if (var(j) == 0.0) continue;
      margin = std::min(margin, std::sqrt(var(j) + kBatchNormEps) / step);
    }
  }
  return margin;
}

inline double weighted_loss(const ModelParams& p, const Batch& b, const std::vector<double>& w) {
  const QBatch qb(p, b.states, b.queries, NormMode::Train);
  double loss = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) loss += w[i] * qb.values()[i];
  return loss;
}


struct FdCheck {
  std::uint64_t batch_seed = 0;
  std::size_t phases = 0;
  std::vector<std::pair<std::string, double>> relative_errors;  // per learnable group
};

// Central differences with step h on every learnable entry, against
// backprop, for a train-mode batch of 8-node graphs covering all heads.
inline FdCheck finite_difference_check(double h) {
  ModelParams p = init_params(6, 3, 12);
  // Batch norm and ReLU are scale free; larger weights move every bend away from the step.
  p.lift *= 3.0;
  p.aggregate *= 3.0;
  for (auto& head : p.heads) head.hidden *= 10.0;
  perturb_norm(p, 13);
  FdCheck out;
  // First batch with no activation inside the step of a kink.
  Batch b;
  for (out.batch_seed = 14; out.batch_seed < 1000; ++out.batch_seed) {
    b = make_batch(out.batch_seed, 8, 8);
    if (kink_margin(p, b, h) > 12.0) break;
  }
  std::set<int> phases;
  for (const RewireState* s : b.states) phases.insert(static_cast<int>(s->phase()));
  out.phases = phases.size();
  std::mt19937_64 rng(15);
  std::normal_distribution<double> gauss;
  std::vector<double> w(b.queries.size());
  for (double& x : w) x = gauss(rng);

  const QBatch qb(p, b.states, b.queries, NormMode::Train);
  const ModelParams analytic = qb.gradients(w);
  const auto grads = analytic.learnables();
  auto params = p.learnables();
  for (std::size_t t = 0; t < params.size(); ++t) {
    MatrixXd& m = *params[t].second;
    MatrixXd numeric(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double keep = m.data()[i];
      m.data()[i] = keep + h;
      const double up = weighted_loss(p, b, w);
      m.data()[i] = keep - h;
      const double down = weighted_loss(p, b, w);
      m.data()[i] = keep;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    const MatrixXd& a = *grads[t].second;
    const double scale = std::max({a.norm(), numeric.norm(), 1e-12});
    out.relative_errors.emplace_back(params[t].first, (a - numeric).norm() / scale);
  }
  return out;
}

// Eval-mode Q-values of a random state and of its relabeled copy, matched
// action by action.
inline std::pair<std::vector<double>, std::vector<double>> relabeled_q(const ModelParams& p, const Graph& g,
                                                                         int subs, std::mt19937_64& rng) {
  RewireState s = kEnv.reset(g, 0.15);
  for (int t = 0; t < subs % s.horizon(); ++t) {
    const auto acts = valid_actions(s);
    s = kEnv.step(s, acts[rng() % acts.size()]).next_state;
  }
  const auto perm = oracle::random_permutation(g.num_nodes(), rng);
  RewireState r = s;
  r.graph = relabel(s.graph, perm);
  if (s.base) r.base = perm[static_cast<std::size_t>(*s.base)];
  if (s.addition) r.addition = perm[static_cast<std::size_t>(*s.addition)];
  const auto acts = valid_actions(s);
  std::vector<Node> mapped;
  for (Node a : acts) mapped.push_back(perm[static_cast<std::size_t>(a)]);
  return {q_values(s, acts, p), q_values(r, mapped, p)};
}

}  // namespace fixtures
