#include "dnet/recommend.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dnet {
namespace {

std::vector<ItemIndex> normalize_input(std::span<const ItemIndex> input,
                                       std::size_t n_items) {
  std::vector<ItemIndex> out(input.begin(), input.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.back() >= n_items) {
    throw std::out_of_range("input item " + std::to_string(out.back()) +
                            " outside vocabulary");
  }
  return out;
}

RecommendationList rank(std::vector<ScoredItem> scored,
                        const std::vector<double>& popularity,
                        std::vector<ItemIndex> input) {
  std::sort(scored.begin(), scored.end(),
            [&](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              if (popularity[a.item] != popularity[b.item]) {
                return popularity[a.item] > popularity[b.item];
              }
              return a.item < b.item;
            });
  return RecommendationList{std::move(scored), std::move(input)};
}

}  // namespace

std::vector<ScoredItem> dn_scores(const DependencyNetwork& dn,
                                  std::span<const ItemIndex> input,
                                  LookupStats* stats) {
  const std::vector<ItemIndex> in = normalize_input(input, dn.size());
  std::vector<int> x(dn.size(), 0);
  for (ItemIndex i : in) x[i] = 1;

  std::vector<ScoredItem> out;
  out.reserve(dn.size() - in.size());
  for (std::size_t i = 0; i < dn.size(); ++i) {
    if (x[i]) continue;
    std::size_t visited = 0;
    const TreeNode& leaf = dn.tree(i).route(
        [&](ItemIndex j) { return x[j]; }, &visited);
    if (stats) {
      ++stats->tree_traversals;
      stats->nodes_visited += visited;
    }
    out.push_back(ScoredItem{static_cast<ItemIndex>(i), leaf_posterior(leaf, 1)});
  }
  return out;
}

RecommendationList recommend(const DependencyNetwork& dn,
                             std::span<const ItemIndex> input,
                             LookupStats* stats) {
  return rank(dn_scores(dn, input, stats), dn.popularity().probs,
              normalize_input(input, dn.size()));
}

RecommendationList baseline_recommend(const Popularity& popularity,
                                      std::span<const ItemIndex> input) {
  std::vector<ItemIndex> in = normalize_input(input, popularity.probs.size());
  std::vector<ScoredItem> scored;
  scored.reserve(popularity.probs.size() - in.size());
  for (std::size_t i = 0; i < popularity.probs.size(); ++i) {
    const auto item = static_cast<ItemIndex>(i);
    if (std::binary_search(in.begin(), in.end(), item)) continue;
    scored.push_back(ScoredItem{item, popularity.probs[i]});
  }
  return rank(std::move(scored), popularity.probs, std::move(in));
}

}  // namespace dnet
