#ifndef DNET_VIEWER_BUNDLE_H_
#define DNET_VIEWER_BUNDLE_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "dnet/network.h"

namespace dnet {

inline constexpr int kBundleFormatVersion = 1;

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Self-contained JSON document consumed by the browser viewer:
//   format, format_version, slider_max
//   metadata: kappa, seed, model_format_version, dataset {cases, items,
//             checksum}
//   nodes:  [{id, item_id, title, url}]
//   arcs:   [{from, to, strength, order_index}]   (order_index order)
//   trees:  [{target, root}] where a node is either
//           {"split": {variable, value, label, gain, step}, "eq", "neq"}
//           or {"leaf": {counts, posterior}}
std::string export_viewer_bundle(const DependencyNetwork& dn);

struct BundleNode {
  ItemIndex id = 0;
  std::string title;
};

struct ParsedBundle {
  std::vector<BundleNode> nodes;
  std::vector<Arc> arcs;
  std::vector<DecisionTree> trees;
  std::size_t slider_max = 0;
};

// Throws BundleError on malformed input or a version mismatch.
ParsedBundle parse_viewer_bundle(const std::string& text);

}  // namespace dnet

#endif  // DNET_VIEWER_BUNDLE_H_
