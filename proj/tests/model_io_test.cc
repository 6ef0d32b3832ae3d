#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dnet/model_io.h"
#include "synthetic.h"

namespace dnet {
namespace {

DependencyNetwork sample_network(std::uint64_t seed = 3) {
  const CaseMatrix m = testing::mixture_cases(10, 300, 3, seed);
  ItemVocabulary vocab;
  for (std::int64_t i = 0; i < 10; ++i) {
    vocab.add({1000 + i, "Item \"" + std::to_string(i) + "\" \\ x", "/p" + std::to_string(i)});
  }
  return learn_dependency_network(m, vocab, ScoreConfig{0.05}, 1, seed);
}

TEST(ModelIo, RoundTripIsExact) {
  const DependencyNetwork dn = sample_network();
  const std::string text = model_to_string(dn);
  std::istringstream in(text);
  const DependencyNetwork back = read_model(in);
  EXPECT_EQ(back, dn);
  EXPECT_EQ(model_to_string(back), text);
}

TEST(ModelIo, CanonicalHeader) {
  const std::string text = model_to_string(sample_network());
  EXPECT_EQ(text.rfind("dnet-model 1\nconfig kappa 0.050000000000000003 seed 3\n", 0), 0u);
  EXPECT_NE(text.find("\nend\n"), std::string::npos);
}

TEST(ModelIo, SameInputsSameBytes) {
  EXPECT_EQ(model_to_string(sample_network(4)), model_to_string(sample_network(4)));
}

TEST(ModelIo, SaveLoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "dnet_model_io_test.model";
  const DependencyNetwork dn = sample_network();
  save_model(path, dn);
  EXPECT_EQ(load_model(path), dn);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), std::runtime_error);
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos);
  return s.replace(at, from.size(), to);
}

void expect_rejected(const std::string& text) {
  std::istringstream in(text);
  EXPECT_THROW(read_model(in), ModelFormatError);
}

TEST(ModelIo, RejectsCorruption) {
  const std::string text = model_to_string(sample_network());
  expect_rejected(replace_once(text, "dnet-model 1", "dnet-model 2"));
  expect_rejected(replace_once(text, "dnet-model 1", "other-model 1"));
  expect_rejected(text.substr(0, text.size() / 2));
  expect_rejected(replace_once(text, "\nend\n", "\n"));
  expect_rejected(replace_once(text, "arcs ", "arcs 9"));
  expect_rejected(text + "trailing\n");
  expect_rejected("");
}

TEST(ModelIo, RejectsArcsThatDisagreeWithTrees) {
  const DependencyNetwork dn = sample_network();
  ASSERT_GE(dn.arcs().size(), 2u);
  std::string text = model_to_string(dn);
  const auto arc_line = text.find("\narc ");
  const auto next = text.find('\n', arc_line + 1);
  std::string line = text.substr(arc_line + 1, next - arc_line - 1);
  std::istringstream fields(line);
  std::string tag, from, to;
  fields >> tag >> from >> to;
  // Swap endpoints of the strongest arc.
  expect_rejected(text.replace(arc_line + 1, line.size(),
                               "arc " + to + " " + from + line.substr(4 + from.size() + 1 + to.size())));
}

}  // namespace
}  // namespace dnet
