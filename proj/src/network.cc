#include "dnet/network.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "dnet/parallel.h"

namespace dnet {

DependencyNetwork::DependencyNetwork(ItemVocabulary vocabulary,
                                     std::vector<DecisionTree> trees,
                                     ScoreConfig config,
                                     DatasetFingerprint data,
                                     std::uint64_t seed)
    : vocabulary_(std::move(vocabulary)),
      trees_(std::move(trees)),
      config_(config),
      data_(data),
      seed_(seed) {
  config_.validate();
  if (trees_.size() != vocabulary_.size()) {
    throw std::invalid_argument("tree count does not match vocabulary size");
  }
  popularity_.probs.resize(trees_.size());
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const DecisionTree& t = trees_[i];
    if (t.target() != i) {
      throw std::invalid_argument("tree " + std::to_string(i) +
                                  " has target " +
                                  std::to_string(t.target()));
    }
    if (t.n_states() != 2) {
      throw std::invalid_argument("dependency network trees are binary");
    }
    std::uint64_t ones = 0, total = 0;
    for (const TreeNode& node : t.nodes()) {
      if (!node.leaf) {
        if (node.test.variable >= trees_.size()) {
          throw std::invalid_argument("split variable outside vocabulary");
        }
        continue;
      }
      ones += node.counts[1];
      total += node.counts[0] + node.counts[1];
    }
    popularity_.probs[i] = (static_cast<double>(ones) + 1.0) /
                           (static_cast<double>(total) + 2.0);
  }
  arcs_ = derive_arcs(trees_);
}

ParentSets DependencyNetwork::parent_sets() const {
  ParentSets out;
  out.reserve(trees_.size());
  for (const DecisionTree& t : trees_) out.push_back(t.predictors());
  return out;
}

void DependencyNetwork::conditional(std::size_t k, std::span<const int> x,
                                    std::span<double> out) const {
  const TreeNode& leaf =
      trees_[k].route([&](ItemIndex j) { return x[j]; });
  out[0] = leaf_posterior(leaf, 0);
  out[1] = leaf_posterior(leaf, 1);
}

void DependencyNetwork::initial_distribution(std::size_t k,
                                             std::span<double> out) const {
  out[1] = popularity_.probs[k];
  out[0] = 1.0 - out[1];
}

std::vector<Arc> derive_arcs(std::span<const DecisionTree> trees) {
  std::vector<Arc> arcs;
  for (const DecisionTree& t : trees) {
    // First split (lowest step) on each predictor.
    std::map<ItemIndex, const TreeNode*> first;
    for (const TreeNode& node : t.nodes()) {
      if (node.leaf) continue;
      auto [it, inserted] = first.emplace(node.test.variable, &node);
      if (!inserted && node.step < it->second->step) it->second = &node;
    }
    for (const auto& [from, node] : first) {
      arcs.push_back(Arc{from, t.target(), node->gain, 0});
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    if (a.to != b.to) return a.to < b.to;
    return a.from < b.from;
  });
  for (std::size_t k = 0; k < arcs.size(); ++k) arcs[k].order = k;
  return arcs;
}

DependencyNetwork learn_dependency_network(const CaseMatrix& data,
                                           ItemVocabulary vocabulary,
                                           const ScoreConfig& cfg,
                                           unsigned threads,
                                           std::uint64_t seed) {
  cfg.validate();
  if (data.empty()) throw DataError("cannot learn from an empty dataset");
  if (vocabulary.size() != data.n_items()) {
    throw std::invalid_argument("vocabulary size does not match data");
  }
  std::vector<DecisionTree> trees(data.n_items());
  parallel_for(data.n_items(), threads, [&](std::size_t i) {
    trees[i] = learn_tree(static_cast<ItemIndex>(i), data, cfg);
  });
  return DependencyNetwork(std::move(vocabulary), std::move(trees), cfg,
                           fingerprint(data), seed);
}

bool is_bidirectional(const ParentSets& parents) {
  for (std::size_t child = 0; child < parents.size(); ++child) {
    for (ItemIndex parent : parents[child]) {
      const auto& back = parents.at(parent);
      if (!std::binary_search(back.begin(), back.end(),
                              static_cast<ItemIndex>(child))) {
        return false;
      }
    }
  }
  return true;
}

std::set<std::pair<ItemIndex, ItemIndex>> adjacency_set(
    const ParentSets& parents) {
  std::set<std::pair<ItemIndex, ItemIndex>> out;
  for (std::size_t child = 0; child < parents.size(); ++child) {
    const auto c = static_cast<ItemIndex>(child);
    for (ItemIndex parent : parents[child]) {
      out.emplace(std::min(parent, c), std::max(parent, c));
    }
  }
  return out;
}

}  // namespace dnet
