#ifndef DNET_NETWORK_H_
#define DNET_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dnet/data.h"
#include "dnet/trees.h"

namespace dnet {

struct Arc {
  ItemIndex from = 0;
  ItemIndex to = 0;
  double strength = 0.0;  // gain of the first split on `from` in tree `to`
  std::size_t order = 0;  // rank by descending strength

  friend bool operator==(const Arc&, const Arc&) = default;
};

// parents[i] = sorted parent indices of X_i.
using ParentSets = std::vector<std::vector<ItemIndex>>;

// One decision tree per binary variable plus the arcs they induce.
class DependencyNetwork {
 public:
  DependencyNetwork() = default;
  // Checks trees[i].target() == i and derives arcs and popularity.
  DependencyNetwork(ItemVocabulary vocabulary, std::vector<DecisionTree> trees,
                    ScoreConfig config, DatasetFingerprint data,
                    std::uint64_t seed = 0);

  std::size_t size() const { return trees_.size(); }
  int states(std::size_t) const { return 2; }
  const ItemVocabulary& vocabulary() const { return vocabulary_; }
  const DecisionTree& tree(std::size_t i) const { return trees_[i]; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const ScoreConfig& config() const { return config_; }
  const DatasetFingerprint& data_fingerprint() const { return data_; }
  std::uint64_t seed() const { return seed_; }
  ParentSets parent_sets() const;

  // Smoothed training frequency of X_i = 1, from the leaf counts.
  const Popularity& popularity() const { return popularity_; }

  // ConditionalModel surface for the sampler.
  void conditional(std::size_t k, std::span<const int> x,
                   std::span<double> out) const;
  void initial_distribution(std::size_t k, std::span<double> out) const;

  friend bool operator==(const DependencyNetwork& a,
                         const DependencyNetwork& b) {
    return a.vocabulary_ == b.vocabulary_ && a.trees_ == b.trees_ &&
           a.arcs_ == b.arcs_ && a.config_.kappa == b.config_.kappa &&
           a.data_ == b.data_ && a.seed_ == b.seed_;
  }

 private:
  ItemVocabulary vocabulary_;
  std::vector<DecisionTree> trees_;
  std::vector<Arc> arcs_;
  ScoreConfig config_;
  DatasetFingerprint data_;
  std::uint64_t seed_ = 0;
  Popularity popularity_;
};

// Arc X -> Y for every X in predictors(trees[Y]); ordered by strength
// descending, ties by (to, from) ascending.
std::vector<Arc> derive_arcs(std::span<const DecisionTree> trees);

// Learns trees[i] = learn_tree(i, data, cfg) for every variable.
DependencyNetwork learn_dependency_network(const CaseMatrix& data,
                                           ItemVocabulary vocabulary,
                                           const ScoreConfig& cfg,
                                           unsigned threads = 1,
                                           std::uint64_t seed = 0);

bool is_bidirectional(const ParentSets& parents);
// Unordered pairs {X, Y} stored as (min, max).
std::set<std::pair<ItemIndex, ItemIndex>> adjacency_set(
    const ParentSets& parents);

inline bool is_bidirectional(const DependencyNetwork& dn) {
  return is_bidirectional(dn.parent_sets());
}
inline std::set<std::pair<ItemIndex, ItemIndex>> adjacency_set(
    const DependencyNetwork& dn) {
  return adjacency_set(dn.parent_sets());
}

}  // namespace dnet

#endif  // DNET_NETWORK_H_
