#include "dnet/model_io.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace dnet {
namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  void expect_eof() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_no_;
      if (rest.find_first_not_of(" \r") != std::string::npos) {
        fail("content after 'end'");
      }
    }
  }

  // Next line split into whitespace-separated tokens; quoted tokens keep
  // their spaces and are unescaped.
  std::vector<std::string> next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of model file");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ') {
        ++i;
        continue;
      }
      std::string tok;
      if (line[i] == '"') {
        ++i;
        bool closed = false;
        while (i < line.size()) {
          char ch = line[i++];
          if (ch == '"') {
            closed = true;
            break;
          }
          if (ch == '\\' && i < line.size()) {
            ch = line[i++];
            if (ch == 'n') ch = '\n';
          }
          tok.push_back(ch);
        }
        if (!closed) fail("unterminated string");
      } else {
        while (i < line.size() && line[i] != ' ') tok.push_back(line[i++]);
      }
      tokens.push_back(std::move(tok));
    }
    return tokens;
  }

  std::vector<std::string> expect(const std::string& keyword,
                                  std::size_t n_tokens) {
    auto tokens = next();
    if (tokens.size() != n_tokens || tokens[0] != keyword) {
      fail("expected '" + keyword + "' record with " +
           std::to_string(n_tokens) + " fields");
    }
    return tokens;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelFormatError("model line " + std::to_string(line_no_) + ": " +
                           what);
  }

  template <class T>
  T number(const std::string& tok) const {
    std::istringstream ss(tok);
    T v{};
    ss >> v;
    if (!ss || !ss.eof()) fail("bad number '" + tok + "'");
    return v;
  }

  double real_number(const std::string& tok) const {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') fail("bad real '" + tok + "'");
    return v;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const DependencyNetwork& dn) {
  const DatasetFingerprint& fp = dn.data_fingerprint();
  char checksum[17];
  std::snprintf(checksum, sizeof(checksum), "%016" PRIx64, fp.checksum);

  out << "dnet-model " << kModelFormatVersion << '\n';
  out << "config kappa " << real(dn.config().kappa) << " seed " << dn.seed()
      << '\n';
  out << "dataset cases " << fp.n_cases << " items " << fp.n_items
      << " checksum " << checksum << '\n';
  out << "items " << dn.vocabulary().size() << '\n';
  for (const Item& item : dn.vocabulary().items()) {
    out << "item " << item.id << ' ' << quoted(item.title) << ' '
        << quoted(item.url) << '\n';
  }
  for (const DecisionTree& tree : dn.trees()) {
    out << "tree " << tree.target() << " states " << tree.n_states()
        << " nodes " << tree.nodes().size() << '\n';
    for (const TreeNode& node : tree.nodes()) {
      if (node.leaf) {
        out << "leaf";
        for (std::uint64_t c : node.counts) out << ' ' << c;
        out << '\n';
      } else {
        out << "split " << node.test.variable << ' ' << node.test.value << ' '
            << real(node.gain) << ' ' << node.step << '\n';
      }
    }
  }
  out << "arcs " << dn.arcs().size() << '\n';
  for (const Arc& arc : dn.arcs()) {
    out << "arc " << arc.from << ' ' << arc.to << ' ' << real(arc.strength)
        << ' ' << arc.order << '\n';
  }
  out << "end\n";
}

std::string model_to_string(const DependencyNetwork& dn) {
  std::ostringstream out;
  write_model(out, dn);
  return out.str();
}

DependencyNetwork read_model(std::istream& in) {
  LineReader r(in);
  auto header = r.next();
  if (header.size() != 2 || header[0] != "dnet-model") {
    r.fail("not a dependency-network model file");
  }
  if (r.number<int>(header[1]) != kModelFormatVersion) {
    r.fail("unsupported model format version " + header[1] + " (expected " +
           std::to_string(kModelFormatVersion) + ")");
  }
  auto config = r.expect("config", 5);
  if (config[1] != "kappa" || config[3] != "seed") r.fail("bad config record");
  ScoreConfig cfg{r.real_number(config[2])};
  const auto seed = r.number<std::uint64_t>(config[4]);

  auto dataset = r.expect("dataset", 7);
  if (dataset[1] != "cases" || dataset[3] != "items" ||
      dataset[5] != "checksum" || dataset[6].size() != 16) {
    r.fail("bad dataset record");
  }
  DatasetFingerprint fp;
  fp.n_cases = r.number<std::uint64_t>(dataset[2]);
  fp.n_items = r.number<std::uint64_t>(dataset[4]);
  fp.checksum = std::stoull(dataset[6], nullptr, 16);

  const auto n_items = r.number<std::size_t>(r.expect("items", 2)[1]);
  ItemVocabulary vocab;
  for (std::size_t i = 0; i < n_items; ++i) {
    auto item = r.expect("item", 4);
    try {
      vocab.add(Item{r.number<std::int64_t>(item[1]), item[2], item[3]});
    } catch (const VocabularyError& e) {
      r.fail(e.what());
    }
  }

  std::vector<DecisionTree> trees;
  trees.reserve(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    auto head = r.expect("tree", 6);
    if (head[2] != "states" || head[4] != "nodes") r.fail("bad tree header");
    const auto target = r.number<ItemIndex>(head[1]);
    const int states = r.number<int>(head[3]);
    const auto n_nodes = r.number<std::size_t>(head[5]);
    if (states < 2) r.fail("tree needs at least two states");
    std::vector<TreeNode> nodes(n_nodes);
    for (TreeNode& node : nodes) {
      auto tok = r.next();
      if (!tok.empty() && tok[0] == "leaf" &&
          tok.size() == static_cast<std::size_t>(states) + 1) {
        node.leaf = true;
        for (int k = 0; k < states; ++k) {
          node.counts.push_back(r.number<std::uint64_t>(tok[k + 1]));
        }
      } else if (!tok.empty() && tok[0] == "split" && tok.size() == 5) {
        node.leaf = false;
        node.test = SplitTest{r.number<ItemIndex>(tok[1]),
                              r.number<int>(tok[2])};
        node.gain = r.real_number(tok[3]);
        node.step = r.number<std::int32_t>(tok[4]);
      } else {
        r.fail("expected 'leaf' or 'split' node");
      }
    }
    try {
      trees.emplace_back(target, states, std::move(nodes));
    } catch (const std::invalid_argument& e) {
      r.fail(std::string("invalid tree: ") + e.what());
    }
  }

  const auto n_arcs = r.number<std::size_t>(r.expect("arcs", 2)[1]);
  std::vector<Arc> arcs;
  for (std::size_t a = 0; a < n_arcs; ++a) {
    auto tok = r.expect("arc", 5);
    arcs.push_back(Arc{r.number<ItemIndex>(tok[1]), r.number<ItemIndex>(tok[2]),
                       r.real_number(tok[3]), r.number<std::size_t>(tok[4])});
  }
  r.expect("end", 1);
  r.expect_eof();

  DependencyNetwork dn;
  try {
    dn = DependencyNetwork(std::move(vocab), std::move(trees), cfg, fp, seed);
  } catch (const std::invalid_argument& e) {
    r.fail(std::string("invalid network: ") + e.what());
  }
  if (dn.arcs() != arcs) r.fail("arc list does not match the trees");
  return dn;
}

void save_model(const std::filesystem::path& path,
                const DependencyNetwork& dn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_model(out, dn);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

DependencyNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_model(in);
}

}  // namespace dnet
