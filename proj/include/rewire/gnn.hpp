#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rewire/env.hpp"

namespace rewire {

inline constexpr int kFeatureDim = 3;
inline constexpr int kHiddenDim = 128;
inline constexpr int kNumHeads = 3;
inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

/// One phase-specific value head:
///   q = output * BN(ReLU(hidden * z)),  z = [mu_a1 (+) mu_a2 (+) mu_A (+) mu(G)]
/// with the marked-node blocks present only for the later phases.
struct QHead {
  Eigen::MatrixXd hidden;        // H x (k+2)d
  Eigen::MatrixXd output;        // 1 x H
  Eigen::MatrixXd bn_scale;      // H x 1
  Eigen::MatrixXd bn_shift;      // H x 1
  Eigen::MatrixXd running_mean;  // H x 1, not learned
  Eigen::MatrixXd running_var;   // H x 1, not learned
};

/// Shared structure2vec weights plus three Q heads.
struct ModelParams {
  int embedding_dim = 0;
  int rounds = 0;
  Eigen::MatrixXd lift;       // d x F, applied to node features
  Eigen::MatrixXd aggregate;  // d x d, applied to summed neighbour embeddings
  std::array<QHead, kNumHeads> heads;

  using Named = std::pair<std::string, Eigen::MatrixXd*>;
  using ConstNamed = std::pair<std::string, const Eigen::MatrixXd*>;

  /// Every trainable tensor, in a fixed order with stable names.
  std::vector<Named> learnables();
  std::vector<ConstNamed> learnables() const;
  /// Batch-norm running statistics.
  std::vector<Named> buffers();
  std::vector<ConstNamed> buffers() const;

  /// Same shapes, every tensor (including buffers) zero.
  ModelParams zeros_like() const;
  int head_input_width(int head) const { return (head + 2) * embedding_dim; }
};

/// Glorot-uniform weights, batch-norm scale 1 / shift 0, running stats (0, 1).
ModelParams init_params(int embedding_dim, int rounds, std::uint64_t seed);

/// x_i = [1, 1{i == base}, 1{i == addition}], one column per node.
Eigen::MatrixXd node_features(const RewireState& s);

struct EmbeddingResult {
  Eigen::MatrixXd nodes;  // d x n
  Eigen::VectorXd graph;  // sum of node columns
};

/// `rounds` mean-field updates mu <- ReLU(lift x + aggregate * sum_{j in N(i)} mu_j), mu^(0) = 0.
EmbeddingResult embed(const Graph& g, const Eigen::MatrixXd& features, const ModelParams& p);

enum class NormMode { Train, Eval };

/// Q-values of `candidates` under the head selected by the state's phase.
/// Eval mode normalises with running statistics; train mode with the
/// statistics of this candidate set. Throws on an empty candidate list.
std::vector<double> q_values(const RewireState& s, std::span<const Node> candidates, const ModelParams& p,
                             NormMode mode = NormMode::Eval);

/// Eval-mode max over valid actions for each state; states must be
/// non-terminal with a non-empty action set.
std::vector<double> max_q_values(std::span<const RewireState* const> states, const ModelParams& p);

/// A (state, action) pair inside a QBatch; `state` indexes the state list.
struct QQuery {
  std::size_t state = 0;
  Node action = 0;
};

/// Batched forward pass that records everything needed for backprop.
///
/// All states are embedded together as one disjoint union. In train mode each
/// head normalises over the queries routed to it. The batch keeps a pointer
/// to `p`, which must outlive it and stay unchanged.
class QBatch {
 public:
  QBatch(const ModelParams& p, std::span<const RewireState* const> states, std::span<const QQuery> queries,
         NormMode mode);

  std::span<const double> values() const { return values_; }

  /// d loss / d parameters given d loss / d q for every query.
  ModelParams gradients(std::span<const double> dloss_dq) const;

  /// Exponential moving update of each head's running statistics from the
  /// batch statistics (unbiased variance). Heads with fewer than two queries
  /// are left untouched.
  void update_running_stats(ModelParams& p, double momentum = kBatchNormMomentum) const;

 private:
  struct HeadCache {
    std::vector<std::size_t> members;  // query indices
    Eigen::MatrixXd input;             // in x B
    Eigen::MatrixXd pre;               // H x B
    Eigen::MatrixXd normalized;        // H x B (x-hat)
    Eigen::VectorXd mean;
    Eigen::VectorXd var;               // biased
    Eigen::VectorXd inv_std;
  };

  const ModelParams* p_;
  NormMode mode_;
  std::vector<std::size_t> state_of_query_;
  std::vector<int> node_offset_;
  std::vector<int> adj_offset_;
  std::vector<int> adj_;
  Eigen::MatrixXd features_;
  std::vector<Eigen::MatrixXd> mu_;   // rounds+1 entries
  std::vector<Eigen::MatrixXd> pre_;  // rounds entries
  std::vector<Eigen::MatrixXd> agg_;  // rounds entries
  Eigen::MatrixXd graph_;             // d x S
  std::vector<std::optional<Node>> base_;
  std::vector<std::optional<Node>> addition_;
  std::vector<Node> action_;
  std::array<HeadCache, kNumHeads> heads_;
  std::vector<double> values_;
};

/// Versioned JSON checkpoint with every tensor, dims and running statistics.
/// Doubles are written in shortest round-trip form, so loading reproduces
/// the parameters bit for bit.
void save_checkpoint(const ModelParams& p, std::ostream& out);
ModelParams load_checkpoint(std::istream& in);
void save_checkpoint_file(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint_file(const std::string& path);

}  // namespace rewire
