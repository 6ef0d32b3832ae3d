// dnet: command-line front end for learning, sampling, recommending with,
// evaluating, and exporting dependency networks.
//
// Exit codes: 0 success, 1 usage, 2 data/IO error, 3 internal invariant
// violation.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dnet/data.h"
#include "dnet/evaluate.h"
#include "dnet/joint.h"
#include "dnet/model_io.h"
#include "dnet/network.h"
#include "dnet/recommend.h"
#include "dnet/sampler.h"
#include "dnet/serve.h"
#include "dnet/viewer_bundle.h"

namespace {

using namespace dnet;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  double kappa = 0.01;
  unsigned threads = 1;
  std::string format = "uci";
  std::size_t items = 0;  // vocabulary size for the pairs format
};

struct Dataset {
  ItemVocabulary vocabulary;
  CaseMatrix cases;
};

Dataset load_dataset(const std::string& path, const Globals& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  if (g.format == "uci") {
    UciDataset d = parse_uci_web(in);
    return {std::move(d.vocabulary), std::move(d.cases)};
  }
  if (g.items == 0) throw UsageError("--format pairs requires --items N");
  return {ItemVocabulary::numbered(g.items), parse_sparse_pairs(in, g.items)};
}

// Cases re-expressed over `vocab` by external id.
CaseMatrix load_cases_for(const std::string& path, const Globals& g,
                          const ItemVocabulary& vocab) {
  Dataset d = load_dataset(path, g);
  return reindex(d.cases, d.vocabulary, vocab);
}

std::vector<std::int64_t> parse_id_list(const std::string& text) {
  std::vector<std::int64_t> ids;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      ids.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad item id '" + tok + "'");
    }
  }
  return ids;
}

std::string digits(std::span<const int> x) {
  std::string out;
  out.reserve(x.size());
  for (int v : x) out += std::to_string(v);
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << body)) throw DataError("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- subcommands -----------------------------------------------------------

struct IngestArgs {
  std::string input;
  double split = 0.0;
  std::string train_out, test_out;
};

int cmd_ingest(const Globals& g, const IngestArgs& a) {
  Dataset d = load_dataset(a.input, g);
  std::cout << "cases\t" << d.cases.size() << "\nitems\t" << d.vocabulary.size()
            << "\npreferences\t" << d.cases.total_preferences()
            << "\nmean_items_per_case\t" << d.cases.mean_items() << "\n";
  if (a.split > 0.0) {
    if (a.train_out.empty() || a.test_out.empty()) {
      throw UsageError("--split requires --train-out and --test-out");
    }
    auto [train, test] = split_train_test(d.cases, a.split, g.seed);
    std::ostringstream tr, te;
    write_uci_web(tr, d.vocabulary, train);
    write_uci_web(te, d.vocabulary, test);
    write_file(a.train_out, tr.str());
    write_file(a.test_out, te.str());
    std::cout << "seed\t" << g.seed << "\ntrain_cases\t" << train.size()
              << "\ntest_cases\t" << test.size() << "\n";
  }
  return 0;
}

struct LearnArgs {
  std::string train, out;
};

int cmd_learn(const Globals& g, const LearnArgs& a) {
  Dataset d = load_dataset(a.train, g);
  if (d.cases.empty()) throw DataError("training set has no cases");
  const auto start = std::chrono::steady_clock::now();
  const DependencyNetwork dn = learn_dependency_network(
      d.cases, std::move(d.vocabulary), ScoreConfig{g.kappa}, g.threads,
      g.seed);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  save_model(a.out, dn);

  std::size_t leaves = 0;
  std::cout << "items\t" << dn.size() << "\narcs\t" << dn.arcs().size()
            << "\nkappa\t" << dn.config().kappa << "\nseed\t" << dn.seed()
            << "\nleaves_per_variable\t";
  for (std::size_t i = 0; i < dn.size(); ++i) {
    leaves += dn.tree(i).leaf_count();
    std::cout << (i ? "," : "") << dn.tree(i).leaf_count();
  }
  std::cout << "\ntotal_leaves\t" << leaves << "\n";
  std::cerr << "learned in " << seconds << " s\n";
  return 0;
}

struct SampleArgs {
  std::string model, evidence, output = "states", init = "zeros";
  std::size_t burn_in = 1000, samples = 1000, thin = 1;
};

int cmd_sample(const Globals& g, const SampleArgs& a) {
  const DependencyNetwork dn = load_model(a.model);
  GibbsConfig cfg;
  cfg.seed = g.seed;
  cfg.burn_in = a.burn_in;
  cfg.samples = a.samples;
  cfg.thin = a.thin;
  if (a.init == "zeros") {
    cfg.init = InitPolicy::kZeros;
  } else if (a.init == "marginal") {
    cfg.init = InitPolicy::kMarginalRandom;
  } else {
    throw UsageError("--init must be 'zeros' or 'marginal'");
  }
  Evidence evidence;
  for (const std::string& part : [&] {
         std::vector<std::string> parts;
         std::stringstream ss(a.evidence);
         std::string tok;
         while (std::getline(ss, tok, ',')) {
           if (!tok.empty()) parts.push_back(tok);
         }
         return parts;
       }()) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("evidence needs id=state");
    const auto id = parse_id_list(part.substr(0, eq));
    const std::string state = part.substr(eq + 1);
    if (id.size() != 1 || (state != "0" && state != "1")) {
      throw UsageError("bad evidence '" + part + "'");
    }
    evidence.emplace_back(dn.vocabulary().index_of(id[0]), state == "1");
  }

  std::cerr << "seed " << cfg.seed << "\n";
  if (a.output == "states") {
    ordered_gibbs(dn, cfg, evidence, [](std::span<const int> x) {
      std::cout << digits(x) << '\n';
    });
  } else if (a.output == "marginals") {
    GibbsResult r = gibbs_estimate(dn, cfg, evidence);
    std::cout << "item_id\ttitle\tp1\n";
    for (std::size_t i = 0; i < dn.size(); ++i) {
      const Item& item = dn.vocabulary()[static_cast<ItemIndex>(i)];
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", r.marginals[i][1]);
      std::cout << item.id << '\t' << item.title << '\t' << buf << '\n';
    }
  } else {
    throw UsageError("--output must be 'states' or 'marginals'");
  }
  return 0;
}

struct RecommendArgs {
  std::string model, items;
  std::size_t top = 0;
};

int cmd_recommend(const Globals&, const RecommendArgs& a) {
  const DependencyNetwork dn = load_model(a.model);
  std::vector<ItemIndex> input;
  for (std::int64_t id : parse_id_list(a.items)) {
    input.push_back(dn.vocabulary().index_of(id));
  }
  const RecommendationList list = recommend(dn, input);
  const std::size_t shown =
      a.top == 0 ? list.entries.size() : std::min(a.top, list.entries.size());
  std::cout << "rank\titem_id\ttitle\tscore\n";
  for (std::size_t k = 0; k < shown; ++k) {
    const Item& item = dn.vocabulary()[list.entries[k].item];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", list.entries[k].score);
    std::cout << k << '\t' << item.id << '\t' << item.title << '\t' << buf
              << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  std::string model, train, test, protocol = "allbut1", per_user;
  double half_life = 5.0;
  std::size_t min_preferred = 1;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  EvalConfig cfg;
  parse_protocol(a.protocol, cfg);
  cfg.half_life = a.half_life;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.min_preferred = a.min_preferred;
  cfg.validate();

  EvalReport report;
  std::string model_name;
  if (a.model.starts_with("dn:")) {
    const DependencyNetwork dn = load_model(a.model.substr(3));
    const CaseMatrix test = load_cases_for(a.test, g, dn.vocabulary());
    report = cf_evaluate(dn, test, cfg);
    model_name = "dn";
  } else if (a.model == "baseline") {
    if (a.train.empty()) throw UsageError("baseline needs --train");
    Dataset train = load_dataset(a.train, g);
    const CaseMatrix test = load_cases_for(a.test, g, train.vocabulary);
    report = cf_evaluate(popularity(train.cases), test, cfg);
    model_name = "baseline";
  } else {
    throw UsageError("--model must be 'dn:<file>' or 'baseline'");
  }

  char score[32];
  std::snprintf(score, sizeof(score), "%.4f", report.score);
  std::cout << "protocol\tmodel\tscore\tn_users\tskipped\tseed\n"
            << cfg.protocol_name() << '\t' << model_name << '\t' << score
            << '\t' << report.n_users << '\t' << report.skipped << '\t'
            << cfg.seed << '\n';
  if (!a.per_user.empty()) {
    std::ostringstream out;
    out << "user\tmeasured\tutility\n";
    for (const UserResult& u : report.per_user) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", u.utility);
      out << u.user << '\t' << u.measured << '\t' << buf << '\n';
    }
    write_file(a.per_user, out.str());
  }
  return 0;
}

struct OracleArgs {
  std::string model, joint, order;
};

void print_distribution(const StateSpace& space, const Eigen::VectorXd& pi) {
  std::vector<int> x(space.variables());
  for (std::size_t s = 0; s < space.size(); ++s) {
    space.decode(s, x);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", pi(static_cast<Eigen::Index>(s)));
    std::cout << digits(x) << '\t' << buf << '\n';
  }
}

template <class Model>
int run_oracle(const Model& model, const std::string& order_text) {
  std::vector<std::size_t> order(model.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!order_text.empty()) {
    order.clear();
    for (std::int64_t k : parse_id_list(order_text)) {
      if (k < 0) throw UsageError("negative variable in --order");
      order.push_back(static_cast<std::size_t>(k));
    }
  }
  const TransitionMatrix m = chain_matrix(model, order);
  print_distribution(state_space(model), exact_stationary(m));
  return 0;
}

int cmd_oracle(const Globals&, const OracleArgs& a) {
  if (a.model.empty() == a.joint.empty()) {
    throw UsageError("give exactly one of --model or --joint");
  }
  if (!a.model.empty()) return run_oracle(load_model(a.model), a.order);

  std::istringstream in(read_file(a.joint));
  std::vector<double> values;
  for (double v; in >> v;) values.push_back(v);
  if (!in.eof()) throw DataError("joint file must hold whitespace-separated reals");
  std::size_t n = 0;
  while ((std::size_t{1} << n) < values.size()) ++n;
  if ((std::size_t{1} << n) != values.size()) {
    throw DataError("joint file must hold 2^n probabilities");
  }
  ExplicitJoint joint(StateSpace::binary(n),
                      Eigen::Map<Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size())));
  return run_oracle(consistent_dn_from_joint(joint), a.order);
}

struct ExportArgs {
  std::string model, out;
};

int cmd_export_viewer(const Globals&, const ExportArgs& a) {
  const DependencyNetwork dn = load_model(a.model);
  write_file(a.out, export_viewer_bundle(dn));
  std::cout << "nodes\t" << dn.size() << "\narcs\t" << dn.arcs().size() << "\n";
  return 0;
}

struct ServeArgs {
  std::string bundle, assets, host = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(const Globals&, const ServeArgs& a) {
  std::string bundle = read_file(a.bundle);
  parse_viewer_bundle(bundle);  // reject invalid bundles before serving
  std::optional<std::filesystem::path> assets;
  if (!a.assets.empty()) assets = a.assets;
  ViewerServer server(std::move(bundle), assets);
  const int port = server.bind(a.host, a.port);
  std::cerr << "serving on http://" << a.host << ':' << port << "/\n";
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency-network learning, sampling, and recommendation"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--kappa", g.kappa, "Structure prior kappa (> 0)")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Input format")
      ->capture_default_str()
      ->check(CLI::IsMember({"uci", "pairs"}));
  app.add_option("--items", g.items, "Vocabulary size for --format pairs");

  int status = 0;
  auto guard = [&status](auto fn) {
    return [&status, fn] { status = fn(); };
  };

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse, summarize, and split a dataset");
  c_ingest->add_option("--input", ingest.input)->required();
  c_ingest->add_option("--split", ingest.split, "Test fraction in (0,1)");
  c_ingest->add_option("--train-out", ingest.train_out);
  c_ingest->add_option("--test-out", ingest.test_out);
  c_ingest->callback(guard([&] { return cmd_ingest(g, ingest); }));

  LearnArgs learn;
  auto* c_learn = app.add_subcommand("learn", "Learn a dependency network");
  c_learn->add_option("--train", learn.train)->required();
  c_learn->add_option("--out", learn.out)->required();
  c_learn->callback(guard([&] { return cmd_learn(g, learn); }));

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Ordered Gibbs sampling");
  c_sample->add_option("--model", sample.model)->required();
  c_sample->add_option("--burn-in", sample.burn_in)->capture_default_str();
  c_sample->add_option("--samples", sample.samples)->capture_default_str();
  c_sample->add_option("--thin", sample.thin)->capture_default_str();
  c_sample->add_option("--init", sample.init, "zeros | marginal")
      ->capture_default_str();
  c_sample->add_option("--evidence", sample.evidence, "id=state,...");
  c_sample->add_option("--output", sample.output, "states | marginals")
      ->capture_default_str();
  c_sample->callback(guard([&] { return cmd_sample(g, sample); }));

  RecommendArgs rec;
  auto* c_rec = app.add_subcommand("recommend", "Rank items for a basket");
  c_rec->add_option("--model", rec.model)->required();
  c_rec->add_option("--items", rec.items, "Comma-separated external ids");
  c_rec->add_option("--top", rec.top, "Show only the first N (0 = all)");
  c_rec->callback(guard([&] { return cmd_recommend(g, rec); }));

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Half-life utility evaluation");
  c_eval->add_option("--model", ev.model, "dn:<file> | baseline")->required();
  c_eval->add_option("--train", ev.train, "Training data (baseline)");
  c_eval->add_option("--test", ev.test)->required();
  c_eval->add_option("--protocol", ev.protocol,
                     "allbut1 | given2 | given5 | given10")
      ->capture_default_str();
  c_eval->add_option("--half-life", ev.half_life)->capture_default_str();
  c_eval->add_option("--min-preferred", ev.min_preferred,
                     "All-but-1 eligibility floor")
      ->capture_default_str();
  c_eval->add_option("--per-user", ev.per_user, "Per-user TSV output");
  c_eval->callback(guard([&] { return cmd_evaluate(g, ev); }));

  OracleArgs oracle;
  auto* c_oracle = app.add_subcommand("oracle", "Exact stationary distribution");
  c_oracle->add_option("--model", oracle.model);
  c_oracle->add_option("--joint", oracle.joint, "2^n probabilities");
  c_oracle->add_option("--order", oracle.order, "Visit order, e.g. 1,0,2");
  c_oracle->callback(guard([&] { return cmd_oracle(g, oracle); }));

  ExportArgs exp;
  auto* c_exp = app.add_subcommand("export-viewer", "Write a viewer bundle");
  c_exp->add_option("--model", exp.model)->required();
  c_exp->add_option("--out", exp.out)->required();
  c_exp->callback(guard([&] { return cmd_export_viewer(g, exp); }));

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Serve the viewer locally");
  c_serve->add_option("--bundle", serve.bundle)->required();
  c_serve->add_option("--port", serve.port)->capture_default_str();
  c_serve->add_option("--host", serve.host)->capture_default_str();
  c_serve->add_option("--assets", serve.assets, "Viewer asset directory");
  c_serve->callback(guard([&] { return cmd_serve(g, serve); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return status;
}
