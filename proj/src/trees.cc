#include "dnet/trees.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dnet {
namespace {

constexpr int kBinary = 2;

// ln(k!) for k in [0, size).
class LogFactorials {
 public:
  explicit LogFactorials(std::size_t size) : table_(size) {
    for (std::size_t k = 0; k < size; ++k) {
      table_[k] = std::lgamma(static_cast<double>(k) + 1.0);
    }
  }
  double operator()(std::uint64_t k) const { return table_[k]; }

 private:
  std::vector<double> table_;
};

// Binary-leaf marginal: ln Γ(2) - ln Γ(2 + N) + ln Γ(1 + n0) + ln Γ(1 + n1).
double binary_leaf_marginal(const LogFactorials& lf, std::uint64_t n0,
                            std::uint64_t n1) {
  return lf(n0) + lf(n1) - lf(n0 + n1 + 1);
}

struct Candidate {
  double delta = -std::numeric_limits<double>::infinity();
  ItemIndex variable = 0;
  bool valid = false;
};

// A leaf still open for replacement during learning.
struct OpenLeaf {
  std::int32_t node = 0;
  std::vector<std::uint32_t> cases;
  std::vector<char> used;  // variables already split on along the path
  std::uint64_t ones = 0;  // cases with target = 1
  Candidate best;
};

class TreeLearner {
 public:
  TreeLearner(ItemIndex target, const CaseMatrix& data, const ScoreConfig& cfg)
      : target_(target),
        data_(data),
        log_kappa_(std::log(cfg.kappa)),
        lf_(data.size() + 2),
        hits_(data.n_items()),
        target_hits_(data.n_items()) {}

  DecisionTree run(const std::function<void(const DecisionTree&)>& on_step) {
    nodes_.push_back(TreeNode{});
    OpenLeaf root;
    root.node = 0;
    root.cases.resize(data_.size());
    for (std::uint32_t c = 0; c < data_.size(); ++c) root.cases[c] = c;
    root.used.assign(data_.n_items(), 0);
    open_.push_back(std::move(root));
    evaluate(open_.back());

    for (std::int32_t step = 0;; ++step) {
      const std::size_t chosen = pick();
      if (chosen == open_.size()) break;
      apply(chosen, step);
      if (on_step) on_step(finish());
    }
    return finish();
  }

 private:
  bool has(std::uint32_t c, ItemIndex item) const {
    return data_.contains(c, item);
  }

  void evaluate(OpenLeaf& leaf) {
    std::fill(hits_.begin(), hits_.end(), 0);
    std::fill(target_hits_.begin(), target_hits_.end(), 0);
    leaf.ones = 0;
    for (std::uint32_t c : leaf.cases) {
      const bool positive = has(c, target_);
      leaf.ones += positive;
      for (ItemIndex j : data_[c]) {
        ++hits_[j];
        if (positive) ++target_hits_[j];
      }
    }
    const std::uint64_t n = leaf.cases.size();
    const std::uint64_t zeros = n - leaf.ones;
    const double parent = binary_leaf_marginal(lf_, zeros, leaf.ones);

    leaf.best = Candidate{};
    for (ItemIndex j = 0; j < data_.n_items(); ++j) {
      if (j == target_ || leaf.used[j]) continue;
      const std::uint64_t eq1 = target_hits_[j];
      const std::uint64_t eq0 = hits_[j] - eq1;
      const double delta = log_kappa_ +
                           binary_leaf_marginal(lf_, eq0, eq1) +
                           binary_leaf_marginal(lf_, zeros - eq0,
                                                leaf.ones - eq1) -
                           parent;
      if (!leaf.best.valid || delta > leaf.best.delta) {
        leaf.best = Candidate{delta, j, true};
      }
    }
  }

  // Open leaves in depth-first (preorder) position.
  std::vector<std::size_t> preorder_open() const {
    std::vector<std::int32_t> slot(nodes_.size(), -1);
    for (std::size_t k = 0; k < open_.size(); ++k) {
      slot[open_[k].node] = static_cast<std::int32_t>(k);
    }
    std::vector<std::size_t> order;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      const std::int32_t id = stack.back();
      stack.pop_back();
      const TreeNode& node = nodes_[id];
      if (node.leaf) {
        order.push_back(static_cast<std::size_t>(slot[id]));
      } else {
        stack.push_back(node.child_neq);
        stack.push_back(node.child_eq);
      }
    }
    return order;
  }

  // Best strictly improving replacement; ties go to the lower variable,
  // then the earlier leaf in preorder. Returns open_.size() if none.
  std::size_t pick() const {
    std::size_t chosen = open_.size();
    for (std::size_t k : preorder_open()) {
      const Candidate& c = open_[k].best;
      if (!c.valid || !(c.delta > 0.0)) continue;
      if (chosen == open_.size()) {
        chosen = k;
        continue;
      }
      const Candidate& b = open_[chosen].best;
      if (c.delta > b.delta || (c.delta == b.delta && c.variable < b.variable)) {
        chosen = k;
      }
    }
    return chosen;
  }

  void apply(std::size_t chosen, std::int32_t step) {
    OpenLeaf parent = std::move(open_[chosen]);
    open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(chosen));

    const ItemIndex variable = parent.best.variable;
    const auto eq_id = static_cast<std::int32_t>(nodes_.size());
    TreeNode& node = nodes_[parent.node];
    node.leaf = false;
    node.test = SplitTest{variable, 1};
    node.child_eq = eq_id;
    node.child_neq = eq_id + 1;
    node.gain = parent.best.delta;
    node.step = step;
    nodes_.push_back(TreeNode{});
    nodes_.push_back(TreeNode{});

    OpenLeaf eq, neq;
    eq.node = eq_id;
    neq.node = eq_id + 1;
    for (std::uint32_t c : parent.cases) {
      (has(c, variable) ? eq : neq).cases.push_back(c);
    }
    parent.used[variable] = 1;
    eq.used = parent.used;
    neq.used = std::move(parent.used);
    evaluate(eq);
    evaluate(neq);
    open_.push_back(std::move(eq));
    open_.push_back(std::move(neq));
  }

  DecisionTree finish() const {
    std::vector<TreeNode> nodes = nodes_;
    for (const OpenLeaf& leaf : open_) {
      nodes[leaf.node].counts = {leaf.cases.size() - leaf.ones, leaf.ones};
    }
    std::vector<TreeNode> preorder;
    preorder.reserve(nodes.size());
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      const std::int32_t id = stack.back();
      stack.pop_back();
      preorder.push_back(nodes[id]);
      if (!nodes[id].leaf) {
        stack.push_back(nodes[id].child_neq);
        stack.push_back(nodes[id].child_eq);
      }
    }
    return DecisionTree(target_, kBinary, std::move(preorder));
  }

  ItemIndex target_;
  const CaseMatrix& data_;
  double log_kappa_;
  LogFactorials lf_;
  std::vector<std::uint64_t> hits_;
  std::vector<std::uint64_t> target_hits_;
  std::vector<TreeNode> nodes_;
  std::vector<OpenLeaf> open_;
};

}  // namespace

void ScoreConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("kappa must be a positive finite number");
  }
}

DecisionTree::DecisionTree(ItemIndex target, int n_states)
    : target_(target), n_states_(n_states) {
  TreeNode leaf;
  leaf.counts.assign(static_cast<std::size_t>(n_states), 0);
  nodes_.push_back(std::move(leaf));
}

DecisionTree::DecisionTree(ItemIndex target, int n_states,
                           std::vector<TreeNode> nodes)
    : target_(target), n_states_(n_states), nodes_(std::move(nodes)) {
  if (n_states_ < 2) throw std::invalid_argument("tree needs >= 2 states");
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");

  std::vector<SplitTest> path;
  // Returns one past the last node of the subtree rooted at `at`.
  auto link = [&](auto&& self, std::size_t at) -> std::size_t {
    if (at >= nodes_.size()) {
      throw std::invalid_argument("truncated preorder node list");
    }
    TreeNode& node = nodes_[at];
    if (node.leaf) {
      if (node.counts.size() != static_cast<std::size_t>(n_states_)) {
        throw std::invalid_argument("leaf count vector has wrong length");
      }
      node.child_eq = node.child_neq = -1;
      return at + 1;
    }
    if (node.test.variable == target_) {
      throw std::invalid_argument("split on the tree's own target");
    }
    if (node.test.value < 0 || node.test.value >= n_states_) {
      throw std::invalid_argument("split value out of range");
    }
    for (const SplitTest& t : path) {
      if (t.variable == node.test.variable) {
        throw std::invalid_argument("split repeats a decided variable");
      }
    }
    node.counts.clear();
    path.push_back(node.test);
    node.child_eq = static_cast<std::int32_t>(at + 1);
    const std::size_t after_eq = self(self, at + 1);
    nodes_[at].child_neq = static_cast<std::int32_t>(after_eq);
    const std::size_t end = self(self, after_eq);
    path.pop_back();
    return end;
  };
  if (link(link, 0) != nodes_.size()) {
    throw std::invalid_argument("trailing nodes after the tree");
  }
}

std::vector<ItemIndex> DecisionTree::predictors() const {
  std::vector<ItemIndex> out;
  for (const TreeNode& node : nodes_) {
    if (!node.leaf) out.push_back(node.test.variable);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const TreeNode& n) { return n.leaf; }));
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& node = nodes_[id];
    if (!node.leaf) {
      stack.emplace_back(node.child_eq, d + 1);
      stack.emplace_back(node.child_neq, d + 1);
    }
  }
  return deepest;
}

double leaf_log_marginal(std::span<const std::uint64_t> counts) {
  const double r = static_cast<double>(counts.size());
  double total = 0.0;
  double sum = 0.0;
  for (std::uint64_t n : counts) {
    total += static_cast<double>(n);
    sum += std::lgamma(1.0 + static_cast<double>(n));
  }
  return std::lgamma(r) - std::lgamma(r + total) + sum;
}

double tree_log_score(const DecisionTree& tree, const CaseMatrix& data,
                      const ScoreConfig& cfg) {
  cfg.validate();
  const auto& nodes = tree.nodes();
  std::vector<std::vector<std::uint64_t>> counts(nodes.size());
  for (std::size_t c = 0; c < data.size(); ++c) {
    const TreeNode& leaf = tree.route(
        [&](ItemIndex j) { return data.contains(c, j) ? 1 : 0; });
    auto& slot = counts[static_cast<std::size_t>(&leaf - nodes.data())];
    if (slot.empty()) slot.assign(static_cast<std::size_t>(tree.n_states()), 0);
    ++slot[data.contains(c, tree.target()) ? 1 : 0];
  }
  const double free_params_per_leaf = tree.n_states() - 1;
  double score = 0.0;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!nodes[id].leaf) continue;
    if (counts[id].empty()) {
      counts[id].assign(static_cast<std::size_t>(tree.n_states()), 0);
    }
    score += free_params_per_leaf * std::log(cfg.kappa) +
             leaf_log_marginal(counts[id]);
  }
  return score;
}

DecisionTree learn_tree(
    ItemIndex target, const CaseMatrix& data, const ScoreConfig& cfg,
    const std::function<void(const DecisionTree&)>& on_step) {
  cfg.validate();
  if (target >= data.n_items()) {
    throw std::out_of_range("target " + std::to_string(target) +
                            " outside vocabulary");
  }
  return TreeLearner(target, data, cfg).run(on_step);
}

double leaf_posterior(const TreeNode& leaf, int state) {
  std::uint64_t total = 0;
  for (std::uint64_t n : leaf.counts) total += n;
  return (static_cast<double>(leaf.counts[static_cast<std::size_t>(state)]) +
          1.0) /
         (static_cast<double>(total) + static_cast<double>(leaf.counts.size()));
}

std::vector<double> tree_lookup(const DecisionTree& tree,
                                std::span<const int> x) {
  const TreeNode& leaf = tree.route([&](ItemIndex j) { return x[j]; });
  std::vector<double> out(static_cast<std::size_t>(tree.n_states()));
  for (int k = 0; k < tree.n_states(); ++k) out[k] = leaf_posterior(leaf, k);
  return out;
}

}  // namespace dnet
