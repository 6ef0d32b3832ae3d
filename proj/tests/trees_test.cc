#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dnet/trees.h"
#include "synthetic.h"

namespace dnet {
namespace {

using testing::mixture_cases;
using testing::perfect_pair_cases;

std::vector<std::uint64_t> counts(std::uint64_t a, std::uint64_t b) {
  return {a, b};
}

TEST(LeafLogMarginal, WorkedExamples) {
  EXPECT_EQ(leaf_log_marginal(counts(0, 0)), 0.0);
  EXPECT_NEAR(leaf_log_marginal(counts(3, 1)), std::log(0.05), 1e-10);
  EXPECT_NEAR(leaf_log_marginal(counts(3, 1)), -2.995732273553991, 1e-10);
  EXPECT_NEAR(leaf_log_marginal(counts(2, 2)), std::log(1.0 / 30.0), 1e-10);
  EXPECT_NEAR(leaf_log_marginal(counts(2, 2)), -3.401197381662157, 1e-10);
}

TEST(LeafLogMarginal, ThreeStates) {
  // 2!·1!·0!·2! / 5!
  const std::vector<std::uint64_t> c{2, 1, 0};
  EXPECT_NEAR(leaf_log_marginal(c), std::log(2.0 * 2.0 / 120.0), 1e-12);
}

TEST(TreeLogScore, SingleLeafAndPerfectSplit) {
  const CaseMatrix data = perfect_pair_cases();
  const ScoreConfig cfg;
  const DecisionTree leaf(1);
  EXPECT_NEAR(tree_log_score(leaf, data, cfg), -19.776483938313969, 1e-10);

  TreeNode split;
  split.leaf = false;
  split.test = {0, 1};
  TreeNode l;
  l.counts = {0, 0};
  const DecisionTree perfect(1, 2, {split, l, l});
  EXPECT_NEAR(tree_log_score(perfect, data, cfg), -14.006130917572927, 1e-10);
  EXPECT_NEAR(tree_log_score(perfect, data, cfg),
              2 * std::log(0.01) + 2 * std::log(1.0 / 11.0), 1e-10);
}

TEST(TreeLogScore, EmptyData) {
  EXPECT_NEAR(tree_log_score(DecisionTree(0), CaseMatrix(3), ScoreConfig{}),
              std::log(0.01), 1e-12);
}

TEST(TreeConstruction, RejectsInvalidShapes) {
  TreeNode split;
  split.leaf = false;
  split.test = {0, 1};
  TreeNode leaf;
  leaf.counts = {0, 0};
  EXPECT_THROW(DecisionTree(0, 2, {split, leaf, leaf}), std::invalid_argument);
  EXPECT_THROW(DecisionTree(1, 2, {split, split, leaf, leaf, leaf}),
               std::invalid_argument);
  EXPECT_THROW(DecisionTree(1, 2, {split, leaf}), std::invalid_argument);
  EXPECT_THROW(DecisionTree(1, 2, {leaf, leaf}), std::invalid_argument);
  EXPECT_THROW(ScoreConfig{0.0}.validate(), std::invalid_argument);
}

TEST(LearnTree, PerfectCorrelationSplitsOnce) {
  const DecisionTree t = learn_tree(1, perfect_pair_cases(), ScoreConfig{});
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_FALSE(t.root().leaf);
  EXPECT_EQ(t.root().test.variable, 0u);
  EXPECT_EQ(t.root().step, 0);
  EXPECT_NEAR(t.root().gain, -14.006130917572927 + 19.776483938313969, 1e-10);
  EXPECT_EQ(t.predictors(), std::vector<ItemIndex>{0});
  EXPECT_EQ(t.leaf_count(), 2u);
  EXPECT_EQ(t.depth(), 1u);
}

TEST(LearnTree, IndependentProportionsStaySingleLeaf) {
  // Target 0 and item 1 form an exactly balanced 2x2 table.
  CaseMatrix m(2);
  for (int i = 0; i < 25; ++i) {
    m.add_case({0, 1});
    m.add_case({0});
    m.add_case({1});
    m.add_case({});
  }
  const DecisionTree t = learn_tree(0, m, ScoreConfig{});
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.root().counts, counts(50, 50));
}

TEST(LearnTree, NoOtherVariables) {
  CaseMatrix m(1, {{0}, {}, {0}});
  const DecisionTree t = learn_tree(0, m, ScoreConfig{});
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.root().counts, counts(1, 2));
}

TEST(Lookup, Posteriors) {
  TreeNode empty;
  empty.counts = {0, 0};
  EXPECT_DOUBLE_EQ(leaf_posterior(empty, 0), 0.5);
  TreeNode three_one;
  three_one.counts = {3, 1};
  EXPECT_NEAR(leaf_posterior(three_one, 0), 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(leaf_posterior(three_one, 1), 2.0 / 6.0, 1e-15);

  const DecisionTree t = learn_tree(1, perfect_pair_cases(), ScoreConfig{});
  const std::vector<int> x1_on{1, 0}, x1_off{0, 0};
  EXPECT_NEAR(tree_lookup(t, x1_on)[1], 11.0 / 12.0, 1e-15);
  EXPECT_NEAR(tree_lookup(t, x1_off)[1], 1.0 / 12.0, 1e-15);
}

// --- exhaustive oracle over single-leaf replacements ----------------------

struct LeafSite {
  std::size_t index;
  std::set<ItemIndex> decided;
};

void collect_leaves(const DecisionTree& t, std::size_t at,
                    std::set<ItemIndex>& path, std::vector<LeafSite>& out) {
  const TreeNode& n = t.nodes()[at];
  if (n.leaf) {
    out.push_back({at, path});
    return;
  }
  path.insert(n.test.variable);
  collect_leaves(t, static_cast<std::size_t>(n.child_eq), path, out);
  collect_leaves(t, static_cast<std::size_t>(n.child_neq), path, out);
  path.erase(n.test.variable);
}

DecisionTree with_split(const DecisionTree& t, std::size_t leaf, ItemIndex v) {
  std::vector<TreeNode> nodes = t.nodes();
  TreeNode split;
  split.leaf = false;
  split.test = {v, 1};
  TreeNode empty;
  empty.counts = {0, 0};
  nodes[leaf] = split;
  nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(leaf) + 1,
               {empty, empty});
  return DecisionTree(t.target(), 2, std::move(nodes));
}

// Largest score improvement available from one admissible leaf split.
double best_single_split_delta(const DecisionTree& t, const CaseMatrix& data,
                               const ScoreConfig& cfg) {
  const double base = tree_log_score(t, data, cfg);
  std::vector<LeafSite> sites;
  std::set<ItemIndex> path;
  collect_leaves(t, 0, path, sites);
  double best = -INFINITY;
  for (const LeafSite& s : sites) {
    for (ItemIndex v = 0; v < data.n_items(); ++v) {
      if (v == t.target() || s.decided.count(v)) continue;
      best = std::max(best,
                      tree_log_score(with_split(t, s.index, v), data, cfg) - base);
    }
  }
  return best;
}

class LearnTreeProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(LearnTreeProperty, EveryStepIsTheBestImprovement) {
  const CaseMatrix data = mixture_cases(7, 250, 3, GetParam(), GetParam());
  const ScoreConfig cfg;
  for (ItemIndex target = 0; target < 3; ++target) {
    std::vector<DecisionTree> steps{DecisionTree(target)};
    const DecisionTree final_tree = learn_tree(
        target, data, cfg, [&](const DecisionTree& t) { steps.push_back(t); });
    if (steps.size() > 1) ASSERT_EQ(steps.back(), final_tree);
    EXPECT_EQ(final_tree.leaf_count(), steps.size());
    for (std::size_t s = 0; s + 1 < steps.size(); ++s) {
      const double delta = tree_log_score(steps[s + 1], data, cfg) -
                           tree_log_score(steps[s], data, cfg);
      EXPECT_GT(delta, 0.0);
      EXPECT_NEAR(delta, best_single_split_delta(steps[s], data, cfg), 1e-8)
          << "target " << target << " step " << s;
    }
    EXPECT_LE(best_single_split_delta(final_tree, data, cfg), 1e-9);
  }
}

TEST_P(LearnTreeProperty, GainsAndCountsMatchRouting) {
  const CaseMatrix data = mixture_cases(6, 200, 2, GetParam(), GetParam() + 100);
  const ScoreConfig cfg;
  const DecisionTree t = learn_tree(0, data, cfg);
  std::uint64_t total = 0;
  double split_gain_sum = 0.0;
  std::set<std::int32_t> steps;
  for (const TreeNode& n : t.nodes()) {
    if (n.leaf) {
      total += n.counts[0] + n.counts[1];
    } else {
      split_gain_sum += n.gain;
      steps.insert(n.step);
    }
  }
  EXPECT_EQ(total, data.size());
  EXPECT_EQ(steps.size(), t.leaf_count() - 1);
  if (!steps.empty()) {
    EXPECT_EQ(*steps.begin(), 0);
    EXPECT_EQ(*steps.rbegin(), static_cast<std::int32_t>(steps.size()) - 1);
  }
  EXPECT_NEAR(tree_log_score(t, data, cfg),
              tree_log_score(DecisionTree(0), data, cfg) + split_gain_sum, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, LearnTreeProperty,
                         ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(LearnTree, LargerKappaNeverShrinksTree) {
  const CaseMatrix data = mixture_cases(8, 300, 3, 11);
  for (ItemIndex target = 0; target < 4; ++target) {
    const auto small = learn_tree(target, data, ScoreConfig{1e-6});
    const auto large = learn_tree(target, data, ScoreConfig{0.5});
    EXPECT_LE(small.leaf_count(), large.leaf_count());
  }
}

}  // namespace
}  // namespace dnet
