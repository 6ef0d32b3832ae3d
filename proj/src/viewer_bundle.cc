#include "dnet/viewer_bundle.h"

#include <cinttypes>
#include <cstdio>

#include "dnet/model_io.h"
#include "json.hpp"

namespace dnet {
namespace {

using nlohmann::json;

json tree_node_json(const DependencyNetwork& dn, const DecisionTree& tree,
                    std::size_t at) {
  const TreeNode& node = tree.nodes()[at];
  if (node.leaf) {
    json posterior = json::array();
    for (int k = 0; k < tree.n_states(); ++k) {
      posterior.push_back(leaf_posterior(node, k));
    }
    return json{{"leaf", {{"counts", node.counts}, {"posterior", posterior}}}};
  }
  const auto& title = dn.vocabulary()[node.test.variable].title;
  return json{
      {"split",
       {{"variable", node.test.variable},
        {"value", node.test.value},
        {"label", title + " = " + std::to_string(node.test.value)},
        {"gain", node.gain},
        {"step", node.step}}},
      {"eq", tree_node_json(dn, tree, static_cast<std::size_t>(node.child_eq))},
      {"neq",
       tree_node_json(dn, tree, static_cast<std::size_t>(node.child_neq))}};
}

void flatten(const json& node, std::vector<TreeNode>& out) {
  TreeNode t;
  if (node.contains("leaf")) {
    t.leaf = true;
    t.counts = node.at("leaf").at("counts").get<std::vector<std::uint64_t>>();
    out.push_back(std::move(t));
    return;
  }
  const json& split = node.at("split");
  t.leaf = false;
  t.test = SplitTest{split.at("variable").get<ItemIndex>(),
                     split.at("value").get<int>()};
  t.gain = split.at("gain").get<double>();
  t.step = split.at("step").get<std::int32_t>();
  out.push_back(std::move(t));
  flatten(node.at("eq"), out);
  flatten(node.at("neq"), out);
}

}  // namespace

std::string export_viewer_bundle(const DependencyNetwork& dn) {
  const DatasetFingerprint& fp = dn.data_fingerprint();
  char checksum[17];
  std::snprintf(checksum, sizeof(checksum), "%016" PRIx64, fp.checksum);

  json nodes = json::array();
  for (std::size_t i = 0; i < dn.size(); ++i) {
    const Item& item = dn.vocabulary()[static_cast<ItemIndex>(i)];
    nodes.push_back(json{{"id", i},
                         {"item_id", item.id},
                         {"title", item.title},
                         {"url", item.url}});
  }
  json arcs = json::array();
  for (const Arc& arc : dn.arcs()) {
    arcs.push_back(json{{"from", arc.from},
                        {"to", arc.to},
                        {"strength", arc.strength},
                        {"order_index", arc.order}});
  }
  json trees = json::array();
  for (const DecisionTree& tree : dn.trees()) {
    trees.push_back(
        json{{"target", tree.target()}, {"root", tree_node_json(dn, tree, 0)}});
  }
  json bundle{
      {"format", "dnet-viewer-bundle"},
      {"format_version", kBundleFormatVersion},
      {"slider_max", dn.arcs().size()},
      {"metadata",
       {{"kappa", dn.config().kappa},
        {"seed", dn.seed()},
        {"model_format_version", kModelFormatVersion},
        {"dataset",
         {{"cases", fp.n_cases},
          {"items", fp.n_items},
          {"checksum", checksum}}}}},
      {"nodes", std::move(nodes)},
      {"arcs", std::move(arcs)},
      {"trees", std::move(trees)}};
  return bundle.dump(1) + "\n";
}

ParsedBundle parse_viewer_bundle(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "dnet-viewer-bundle") {
      throw BundleError("not a viewer bundle");
    }
    if (doc.at("format_version").get<int>() != kBundleFormatVersion) {
      throw BundleError("unsupported bundle version " +
                        doc.at("format_version").dump());
    }
    ParsedBundle out;
    out.slider_max = doc.at("slider_max").get<std::size_t>();
    for (const json& n : doc.at("nodes")) {
      out.nodes.push_back(
          BundleNode{n.at("id").get<ItemIndex>(), n.at("title").get<std::string>()});
    }
    for (const json& a : doc.at("arcs")) {
      out.arcs.push_back(Arc{a.at("from").get<ItemIndex>(),
                             a.at("to").get<ItemIndex>(),
                             a.at("strength").get<double>(),
                             a.at("order_index").get<std::size_t>()});
    }
    for (const json& t : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      flatten(t.at("root"), nodes);
      int states = 2;
      for (const TreeNode& n : nodes) {
        if (n.leaf) {
          states = static_cast<int>(n.counts.size());
          break;
        }
      }
      out.trees.emplace_back(t.at("target").get<ItemIndex>(), states,
                             std::move(nodes));
    }
    return out;
  } catch (const json::exception& e) {
    throw BundleError(std::string("malformed bundle: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw BundleError(std::string("invalid tree in bundle: ") + e.what());
  }
}

}  // namespace dnet
