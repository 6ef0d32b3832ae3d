#ifndef DNET_TREES_H_
#define DNET_TREES_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dnet/data.h"

namespace dnet {

// Binary split: the "equal" child takes X_variable == value, the other
// child takes every other state.
struct SplitTest {
  ItemIndex variable = 0;
  int value = 1;

  friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

struct TreeNode {
  bool leaf = true;
  SplitTest test;                     // internal nodes
  std::int32_t child_eq = -1;         // internal nodes
  std::int32_t child_neq = -1;        // internal nodes
  std::vector<std::uint64_t> counts;  // leaves: N_lk per target state
  double gain = 0.0;        // score delta when the split was applied
  std::int32_t step = -1;   // 0-based order in which the split was applied

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct ScoreConfig {
  double kappa = 0.01;

  void validate() const;
};

// Probabilistic decision tree for p(x_target | parents). Nodes are stored
// in preorder: the root is node 0, the "equal" subtree follows its parent
// immediately, then the "other" subtree.
class DecisionTree {
 public:
  DecisionTree() : DecisionTree(0) {}
  // Single leaf with zero counts.
  explicit DecisionTree(ItemIndex target, int n_states = 2);
  // Validates structure and relinks children from the preorder layout.
  DecisionTree(ItemIndex target, int n_states, std::vector<TreeNode> nodes);

  ItemIndex target() const { return target_; }
  int n_states() const { return n_states_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  // Sorted split variables; this set is the parent set of the target.
  std::vector<ItemIndex> predictors() const;
  std::size_t leaf_count() const;
  std::size_t depth() const;

  // Leaf reached by routing; state_of(j) yields the state of X_j.
  // `visited`, when given, is incremented once per node touched.
  template <class StateOf>
  const TreeNode& route(StateOf&& state_of,
                        std::size_t* visited = nullptr) const {
    const TreeNode* node = &nodes_.front();
    for (;;) {
      if (visited) ++*visited;
      if (node->leaf) return *node;
      const int state = state_of(node->test.variable);
      node = &nodes_[state == node->test.value ? node->child_eq
                                               : node->child_neq];
    }
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  ItemIndex target_ = 0;
  int n_states_ = 2;
  std::vector<TreeNode> nodes_;
};

// ln Γ(r) - ln Γ(r + N) + Σ_k ln Γ(1 + N_k), r = counts.size(): the
// Dirichlet(1,...,1)-multinomial marginal likelihood of a leaf.
double leaf_log_marginal(std::span<const std::uint64_t> counts);

// f ln κ + Σ_leaves leaf_log_marginal, with f = leaves * (r - 1) and leaf
// counts recomputed by routing `data` through the tree.
double tree_log_score(const DecisionTree& tree, const CaseMatrix& data,
                      const ScoreConfig& cfg);

// Greedy global-best-first leaf replacement. on_step, when set, sees the
// tree after each applied split.
DecisionTree learn_tree(
    ItemIndex target, const CaseMatrix& data, const ScoreConfig& cfg,
    const std::function<void(const DecisionTree&)>& on_step = {});

// Posterior-mean leaf distribution (N_lk + 1) / (N_l + r) for assignment
// x (x[target] ignored).
std::vector<double> tree_lookup(const DecisionTree& tree,
                                std::span<const int> x);
double leaf_posterior(const TreeNode& leaf, int state);

}  // namespace dnet

#endif  // DNET_TREES_H_
