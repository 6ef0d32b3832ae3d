#ifndef DNET_RECOMMEND_H_
#define DNET_RECOMMEND_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dnet/data.h"
#include "dnet/network.h"

namespace dnet {

struct ScoredItem {
  ItemIndex item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Ranked non-input items; position k is entries[k] (0-based).
struct RecommendationList {
  std::vector<ScoredItem> entries;
  std::vector<ItemIndex> input;  // sorted

  friend bool operator==(const RecommendationList&,
                         const RecommendationList&) = default;
};

// Work counters for the prediction path.
struct LookupStats {
  std::size_t tree_traversals = 0;
  std::size_t nodes_visited = 0;
};

// p(X_i = 1 | input items = 1, everything else = 0) for each non-input i,
// in index order, by one leaf lookup per tree.
std::vector<ScoredItem> dn_scores(const DependencyNetwork& dn,
                                  std::span<const ItemIndex> input,
                                  LookupStats* stats = nullptr);

// Scores descending; ties by popularity descending, then index ascending.
RecommendationList recommend(const DependencyNetwork& dn,
                             std::span<const ItemIndex> input,
                             LookupStats* stats = nullptr);

// Non-input items by popularity descending, index ascending on ties.
RecommendationList baseline_recommend(const Popularity& popularity,
                                      std::span<const ItemIndex> input);

}  // namespace dnet

#endif  // DNET_RECOMMEND_H_
