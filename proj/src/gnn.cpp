#include "rewire/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rewire/rng.hpp"

namespace rewire {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<ModelParams::Named> ModelParams::learnables() {
  std::vector<Named> out{{"embed.lift", &lift}, {"embed.aggregate", &aggregate}};
  for (int k = 0; k < kNumHeads; ++k) {
    const std::string prefix = "head" + std::to_string(k) + ".";
    auto& h = heads[static_cast<std::size_t>(k)];
    out.emplace_back(prefix + "hidden", &h.hidden);
    out.emplace_back(prefix + "output", &h.output);
    out.emplace_back(prefix + "bn_scale", &h.bn_scale);
    out.emplace_back(prefix + "bn_shift", &h.bn_shift);
  }
  return out;
}

std::vector<ModelParams::ConstNamed> ModelParams::learnables() const {
  std::vector<ConstNamed> out;
  for (auto& [name, ptr] : const_cast<ModelParams*>(this)->learnables()) out.emplace_back(name, ptr);
  return out;
}

std::vector<ModelParams::Named> ModelParams::buffers() {
  std::vector<Named> out;
  for (int k = 0; k < kNumHeads; ++k) {
    const std::string prefix = "head" + std::to_string(k) + ".";
    auto& h = heads[static_cast<std::size_t>(k)];
    out.emplace_back(prefix + "running_mean", &h.running_mean);
    out.emplace_back(prefix + "running_var", &h.running_var);
  }
  return out;
}

std::vector<ModelParams::ConstNamed> ModelParams::buffers() const {
  std::vector<ConstNamed> out;
  for (auto& [name, ptr] : const_cast<ModelParams*>(this)->buffers()) out.emplace_back(name, ptr);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto& [name, m] : z.learnables()) m->setZero();
  for (auto& [name, m] : z.buffers()) m->setZero();
  return z;
}

namespace {

MatrixXd glorot(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  MatrixXd m(rows, cols);
  // Row-major fill keeps the draw order independent of Eigen's storage order.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

/// Disjoint union of several graphs in compressed adjacency form.
struct UnionGraph {
  std::vector<int> node_offset{0};
  std::vector<int> adj_offset{0};
  std::vector<int> adj;

  void append(const Graph& g) {
    const int base = node_offset.back();
    for (Node v = 0; v < g.num_nodes(); ++v) {
      for (Node w : g.neighbors(v)) adj.push_back(base + w);
      adj_offset.push_back(static_cast<int>(adj.size()));
    }
    node_offset.push_back(base + g.num_nodes());
  }
  int total_nodes() const { return node_offset.back(); }
  int segments() const { return static_cast<int>(node_offset.size()) - 1; }
};

void aggregate_neighbors(const std::vector<int>& adj_offset, const std::vector<int>& adj, const MatrixXd& in,
                         MatrixXd& out) {
  out.setZero(in.rows(), in.cols());
  const Eigen::Index n = in.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = adj_offset[static_cast<std::size_t>(i)]; k < adj_offset[static_cast<std::size_t>(i) + 1]; ++k) {
      out.col(i) += in.col(adj[static_cast<std::size_t>(k)]);
    }
  }
}

/// Runs every message-passing round. Intermediates are kept only when the
/// output vectors are non-null.
MatrixXd run_rounds(const ModelParams& p, const UnionGraph& u, const MatrixXd& features, std::vector<MatrixXd>* mu,
                    std::vector<MatrixXd>* pre, std::vector<MatrixXd>* agg) {
  const int d = p.embedding_dim;
  const int n = u.total_nodes();
  const MatrixXd lifted = p.lift * features;
  MatrixXd current = MatrixXd::Zero(d, n);
  MatrixXd summed(d, n);
  if (mu) mu->push_back(current);
  for (int l = 0; l < p.rounds; ++l) {
    MatrixXd z = lifted;
    if (l == 0) {
      summed.setZero(d, n);
    } else {
      aggregate_neighbors(u.adj_offset, u.adj, current, summed);
      z.noalias() += p.aggregate * summed;
    }
    current = z.cwiseMax(0.0);
    if (pre) pre->push_back(std::move(z));
    if (agg) agg->push_back(summed);
    if (mu) mu->push_back(current);
  }
  return current;
}

MatrixXd segment_sums(const UnionGraph& u, const MatrixXd& nodes) {
  MatrixXd out = MatrixXd::Zero(nodes.rows(), u.segments());
  for (int s = 0; s < u.segments(); ++s) {
    const int begin = u.node_offset[static_cast<std::size_t>(s)];
    const int end = u.node_offset[static_cast<std::size_t>(s) + 1];
    for (int i = begin; i < end; ++i) out.col(s) += nodes.col(i);
  }
  return out;
}

int head_for(const RewireState& s) { return static_cast<int>(s.phase()); }

/// Eval-mode head evaluation for one state; hidden-layer work on the fixed
/// blocks of the input is shared across candidates.
std::vector<double> head_values_eval(const ModelParams& p, const RewireState& s,
                                     const Eigen::Ref<const MatrixXd>& nodes, const VectorXd& graph,
                                     std::span<const Node> candidates) {
  const int head = head_for(s);
  const QHead& h = p.heads[static_cast<std::size_t>(head)];
  const int d = p.embedding_dim;
  VectorXd context = h.hidden.middleCols((head + 1) * d, d) * graph;
  if (head >= 1) context.noalias() += h.hidden.middleCols(0, d) * nodes.col(*s.base);
  if (head >= 2) context.noalias() += h.hidden.middleCols(d, d) * nodes.col(*s.addition);

  MatrixXd chosen(d, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) chosen.col(static_cast<Eigen::Index>(c)) = nodes.col(candidates[c]);
  MatrixXd hidden = h.hidden.middleCols(head * d, d) * chosen;
  hidden.colwise() += context;
  hidden = hidden.cwiseMax(0.0);

  const VectorXd scale = h.bn_scale.col(0).array() / (h.running_var.col(0).array() + kBatchNormEps).sqrt();
  hidden.colwise() -= h.running_mean.col(0);
  hidden = (hidden.array().colwise() * scale.array()).matrix();
  hidden.colwise() += h.bn_shift.col(0);
  const Eigen::RowVectorXd q = h.output * hidden;
  return std::vector<double>(q.data(), q.data() + q.size());
}

void append_features(const RewireState& s, MatrixXd& features, int offset) {
  features.middleCols(offset, s.graph.num_nodes()) = node_features(s);
}

}  // namespace

ModelParams init_params(int embedding_dim, int rounds, std::uint64_t seed) {
  if (embedding_dim < 1 || rounds < 0) throw std::invalid_argument("init_params: dims must be positive");
  Rng rng = make_rng(seed, 0x5EED);
  ModelParams p;
  p.embedding_dim = embedding_dim;
  p.rounds = rounds;
  p.lift = glorot(embedding_dim, kFeatureDim, rng);
  p.aggregate = glorot(embedding_dim, embedding_dim, rng);
  for (int k = 0; k < kNumHeads; ++k) {
    auto& h = p.heads[static_cast<std::size_t>(k)];
    h.hidden = glorot(kHiddenDim, p.head_input_width(k), rng);
    h.output = glorot(1, kHiddenDim, rng);
    h.bn_scale = MatrixXd::Ones(kHiddenDim, 1);
    h.bn_shift = MatrixXd::Zero(kHiddenDim, 1);
    h.running_mean = MatrixXd::Zero(kHiddenDim, 1);
    h.running_var = MatrixXd::Ones(kHiddenDim, 1);
  }
  return p;
}

MatrixXd node_features(const RewireState& s) {
  const int n = s.graph.num_nodes();
  MatrixXd x = MatrixXd::Zero(kFeatureDim, n);
  x.row(0).setOnes();
  if (s.base) x(1, *s.base) = 1.0;
  if (s.addition) x(2, *s.addition) = 1.0;
  return x;
}

EmbeddingResult embed(const Graph& g, const MatrixXd& features, const ModelParams& p) {
  if (features.rows() != kFeatureDim || features.cols() != g.num_nodes()) {
    throw std::invalid_argument("embed: feature matrix shape mismatch");
  }
  UnionGraph u;
  u.append(g);
  EmbeddingResult out;
  out.nodes = run_rounds(p, u, features, nullptr, nullptr, nullptr);
  out.graph = out.nodes.rowwise().sum();
  return out;
}

std::vector<double> q_values(const RewireState& s, std::span<const Node> candidates, const ModelParams& p,
                             NormMode mode) {
  if (candidates.empty()) throw std::invalid_argument("q_values: empty candidate set");
  if (mode == NormMode::Train) {
    const RewireState* states[] = {&s};
    std::vector<QQuery> queries;
    for (Node a : candidates) queries.push_back({0, a});
    QBatch batch(p, states, queries, NormMode::Train);
    return {batch.values().begin(), batch.values().end()};
  }
  const EmbeddingResult e = embed(s.graph, node_features(s), p);
  return head_values_eval(p, s, e.nodes, e.graph, candidates);
}

std::vector<double> max_q_values(std::span<const RewireState* const> states, const ModelParams& p) {
  std::vector<double> out(states.size(), 0.0);
  if (states.empty()) return out;
  UnionGraph u;
  for (const RewireState* s : states) u.append(s->graph);
  MatrixXd features(kFeatureDim, u.total_nodes());
  for (std::size_t i = 0; i < states.size(); ++i) append_features(*states[i], features, u.node_offset[i]);
  const MatrixXd nodes = run_rounds(p, u, features, nullptr, nullptr, nullptr);
  const MatrixXd graphs = segment_sums(u, nodes);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto actions = valid_actions(*states[i]);
    if (actions.empty()) throw std::invalid_argument("max_q_values: state has no valid action");
    const int begin = u.node_offset[i];
    const auto q = head_values_eval(p, *states[i], nodes.middleCols(begin, states[i]->graph.num_nodes()),
                                    graphs.col(static_cast<Eigen::Index>(i)), actions);
    out[i] = *std::max_element(q.begin(), q.end());
  }
  return out;
}

QBatch::QBatch(const ModelParams& p, std::span<const RewireState* const> states, std::span<const QQuery> queries,
               NormMode mode)
    : p_(&p), mode_(mode) {
  if (queries.empty()) throw std::invalid_argument("QBatch: no queries");
  UnionGraph u;
  for (const RewireState* s : states) {
    u.append(s->graph);
    base_.push_back(s->base);
    addition_.push_back(s->addition);
  }
  features_.resize(kFeatureDim, u.total_nodes());
  for (std::size_t i = 0; i < states.size(); ++i) append_features(*states[i], features_, u.node_offset[i]);
  run_rounds(p, u, features_, &mu_, &pre_, &agg_);
  graph_ = segment_sums(u, mu_.back());
  node_offset_ = u.node_offset;
  adj_offset_ = u.adj_offset;
  adj_ = u.adj;

  const int d = p.embedding_dim;
  values_.assign(queries.size(), 0.0);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::size_t si = queries[q].state;
    if (si >= states.size()) throw std::invalid_argument("QBatch: query state out of range");
    state_of_query_.push_back(si);
    action_.push_back(queries[q].action);
    heads_[static_cast<std::size_t>(head_for(*states[si]))].members.push_back(q);
  }

  const MatrixXd& nodes = mu_.back();
  for (int k = 0; k < kNumHeads; ++k) {
    HeadCache& c = heads_[static_cast<std::size_t>(k)];
    const Eigen::Index b = static_cast<Eigen::Index>(c.members.size());
    if (b == 0) continue;
    const QHead& h = p.heads[static_cast<std::size_t>(k)];
    c.input.resize(p.head_input_width(k), b);
    for (Eigen::Index col = 0; col < b; ++col) {
      const std::size_t q = c.members[static_cast<std::size_t>(col)];
      const std::size_t si = state_of_query_[q];
      const int off = node_offset_[si];
      int block = 0;
      if (k >= 1) c.input.col(col).segment(d * block++, d) = nodes.col(off + *base_[si]);
      if (k >= 2) c.input.col(col).segment(d * block++, d) = nodes.col(off + *addition_[si]);
      c.input.col(col).segment(d * block++, d) = nodes.col(off + action_[q]);
      c.input.col(col).segment(d * block, d) = graph_.col(static_cast<Eigen::Index>(si));
    }
    c.pre.noalias() = h.hidden * c.input;
    const MatrixXd relu = c.pre.cwiseMax(0.0);
    if (mode_ == NormMode::Train) {
      c.mean = relu.rowwise().mean();
      c.var = (relu.colwise() - c.mean).array().square().rowwise().mean().matrix();
    } else {
      c.mean = h.running_mean.col(0);
      c.var = h.running_var.col(0);
    }
    c.inv_std = (c.var.array() + kBatchNormEps).rsqrt().matrix();
    c.normalized = ((relu.colwise() - c.mean).array().colwise() * c.inv_std.array()).matrix();
    const MatrixXd y = ((c.normalized.array().colwise() * h.bn_scale.col(0).array()).colwise() +
                        h.bn_shift.col(0).array())
                           .matrix();
    const Eigen::RowVectorXd qv = h.output * y;
    for (Eigen::Index col = 0; col < b; ++col) values_[c.members[static_cast<std::size_t>(col)]] = qv(col);
  }
}

ModelParams QBatch::gradients(std::span<const double> dloss_dq) const {
  if (dloss_dq.size() != values_.size()) throw std::invalid_argument("QBatch::gradients: size mismatch");
  const ModelParams& p = *p_;
  const int d = p.embedding_dim;
  ModelParams grad = p.zeros_like();
  MatrixXd d_nodes = MatrixXd::Zero(d, node_offset_.back());
  MatrixXd d_graph = MatrixXd::Zero(d, static_cast<Eigen::Index>(node_offset_.size()) - 1);

  for (int k = 0; k < kNumHeads; ++k) {
    const HeadCache& c = heads_[static_cast<std::size_t>(k)];
    const Eigen::Index b = static_cast<Eigen::Index>(c.members.size());
    if (b == 0) continue;
    const QHead& h = p.heads[static_cast<std::size_t>(k)];
    QHead& g = grad.heads[static_cast<std::size_t>(k)];

    Eigen::RowVectorXd dq(b);
    for (Eigen::Index col = 0; col < b; ++col) dq(col) = dloss_dq[c.members[static_cast<std::size_t>(col)]];

    const MatrixXd y = ((c.normalized.array().colwise() * h.bn_scale.col(0).array()).colwise() +
                        h.bn_shift.col(0).array())
                           .matrix();
    g.output.noalias() += dq * y.transpose();
    const MatrixXd dy = h.output.transpose() * dq;  // H x B
    g.bn_scale.col(0) += (dy.array() * c.normalized.array()).rowwise().sum().matrix();
    g.bn_shift.col(0) += dy.rowwise().sum();
    const MatrixXd dxhat = (dy.array().colwise() * h.bn_scale.col(0).array()).matrix();

    MatrixXd drelu;
    if (mode_ == NormMode::Train) {
      const VectorXd sum_dx = dxhat.rowwise().sum();
      const VectorXd sum_dx_xhat = (dxhat.array() * c.normalized.array()).rowwise().sum().matrix();
      const double bd = static_cast<double>(b);
      MatrixXd t = bd * dxhat;
      t.colwise() -= sum_dx;
      t -= (c.normalized.array().colwise() * sum_dx_xhat.array()).matrix();
      drelu = ((t.array().colwise() * c.inv_std.array()) / bd).matrix();
    } else {
      drelu = (dxhat.array().colwise() * c.inv_std.array()).matrix();
    }
    const MatrixXd dpre = (drelu.array() * (c.pre.array() > 0.0).cast<double>()).matrix();
    g.hidden.noalias() += dpre * c.input.transpose();
    const MatrixXd dinput = h.hidden.transpose() * dpre;

    for (Eigen::Index col = 0; col < b; ++col) {
      const std::size_t q = c.members[static_cast<std::size_t>(col)];
      const std::size_t si = state_of_query_[q];
      const int off = node_offset_[si];
      int block = 0;
      if (k >= 1) d_nodes.col(off + *base_[si]) += dinput.col(col).segment(d * block++, d);
      if (k >= 2) d_nodes.col(off + *addition_[si]) += dinput.col(col).segment(d * block++, d);
      d_nodes.col(off + action_[q]) += dinput.col(col).segment(d * block++, d);
      d_graph.col(static_cast<Eigen::Index>(si)) += dinput.col(col).segment(d * block, d);
    }
  }

  for (Eigen::Index s = 0; s < d_graph.cols(); ++s) {
    for (int i = node_offset_[static_cast<std::size_t>(s)]; i < node_offset_[static_cast<std::size_t>(s) + 1]; ++i) {
      d_nodes.col(i) += d_graph.col(s);
    }
  }

  MatrixXd back(d, d_nodes.cols());
  for (int l = p.rounds - 1; l >= 0; --l) {
    const MatrixXd dpre = (d_nodes.array() * (pre_[static_cast<std::size_t>(l)].array() > 0.0).cast<double>()).matrix();
    grad.lift.noalias() += dpre * features_.transpose();
    if (l == 0) break;
    grad.aggregate.noalias() += dpre * agg_[static_cast<std::size_t>(l)].transpose();
    const MatrixXd through = p.aggregate.transpose() * dpre;
    aggregate_neighbors(adj_offset_, adj_, through, back);
    d_nodes.swap(back);
  }
  return grad;
}

void QBatch::update_running_stats(ModelParams& p, double momentum) const {
  if (mode_ != NormMode::Train) return;
  for (int k = 0; k < kNumHeads; ++k) {
    const HeadCache& c = heads_[static_cast<std::size_t>(k)];
    const double b = static_cast<double>(c.members.size());
    if (b < 2) continue;
    QHead& h = p.heads[static_cast<std::size_t>(k)];
    h.running_mean.col(0) = (1.0 - momentum) * h.running_mean.col(0) + momentum * c.mean;
    h.running_var.col(0) = (1.0 - momentum) * h.running_var.col(0) + momentum * (b / (b - 1.0)) * c.var;
  }
}

}  // namespace rewire
