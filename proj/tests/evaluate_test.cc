#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dnet/evaluate.h"
#include "synthetic.h"

namespace dnet {
namespace {

RecommendationList list_of(std::vector<ItemIndex> items) {
  RecommendationList list;
  for (ItemIndex i : items) list.entries.push_back({i, 0.0});
  return list;
}

TEST(PositionProbability, WorkedExamples) {
  EXPECT_EQ(position_probability(0, 5), 1.0);
  EXPECT_NEAR(position_probability(5, 5), 0.5, 1e-12);
  EXPECT_NEAR(position_probability(10, 5), 0.25, 1e-12);
}

TEST(UserScore, WorkedExamples) {
  const std::vector<ItemIndex> first{7};
  EXPECT_EQ(user_score(list_of({7, 1, 2}), first, 5), 1.0);
  const std::vector<ItemIndex> two{3, 4};
  EXPECT_EQ(user_score(list_of({3, 4, 9}), two, 5), 1.0);
  EXPECT_EQ(user_score(list_of({4, 3, 9}), two, 5), 1.0);
  const std::vector<ItemIndex> sixth{6};
  EXPECT_NEAR(user_score(list_of({0, 1, 2, 3, 4, 6}), sixth, 5), 0.5, 1e-12);
}

TEST(UserScore, MissesAndPartialHits) {
  const std::vector<ItemIndex> absent{8};
  EXPECT_EQ(user_score(list_of({0, 1}), absent, 5), 0.0);
  const std::vector<ItemIndex> two{0, 5};
  // Hits at ranks 0 and 2, best possible at ranks 0 and 1.
  const double expected = (1.0 + std::exp2(-2.0 / 5)) / (1.0 + std::exp2(-1.0 / 5));
  EXPECT_NEAR(user_score(list_of({0, 1, 5}), two, 5), expected, 1e-12);
  EXPECT_THROW(user_score(list_of({0}), {}, 5), std::invalid_argument);
}

TEST(UserScore, MovingAHitEarlierNeverHurts) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ItemIndex> items(12);
    for (ItemIndex i = 0; i < 12; ++i) items[i] = i;
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[rng.below(i)]);
    }
    std::vector<ItemIndex> measured{0, 1, 2};
    const double before = user_score(list_of(items), measured, 5);
    EXPECT_GE(before, 0.0);
    EXPECT_LE(before, 1.0);
    const auto pos = std::find(items.begin(), items.end(), measured[rng.below(3)]);
    if (pos != items.begin()) std::iter_swap(pos, pos - 1);
    EXPECT_GE(user_score(list_of(items), measured, 5) + 1e-15, before);
  }
}

TEST(UserScore, DemotingAHitPastAMissStrictlyHurts) {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ItemIndex> items(10);
    for (ItemIndex i = 0; i < 10; ++i) items[i] = i;
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[rng.below(i)]);
    }
    const std::vector<ItemIndex> measured{0, 1, 2, 3};
    const auto is_hit = [&](ItemIndex i) { return i < 4; };
    for (std::size_t k = 0; k + 1 < items.size(); ++k) {
      if (!is_hit(items[k]) || is_hit(items[k + 1])) continue;
      std::vector<ItemIndex> demoted = items;
      std::swap(demoted[k], demoted[k + 1]);
      EXPECT_LT(user_score(list_of(demoted), measured, 5),
                user_score(list_of(items), measured, 5));
    }
  }
}

TEST(Protocol, ParseNames) {
  EvalConfig cfg;
  parse_protocol("given5", cfg);
  EXPECT_EQ(cfg.protocol, Protocol::kGiven);
  EXPECT_EQ(cfg.given, 5u);
  EXPECT_EQ(cfg.protocol_name(), "given5");
  parse_protocol("allbut1", cfg);
  EXPECT_EQ(cfg.protocol, Protocol::kAllBut1);
  EXPECT_EQ(cfg.protocol_name(), "allbut1");
  EXPECT_THROW(parse_protocol("given", cfg), std::invalid_argument);
  EXPECT_THROW(parse_protocol("given0", cfg), std::invalid_argument);
  EXPECT_THROW(parse_protocol("top10", cfg), std::invalid_argument);
  EvalConfig bad;
  bad.half_life = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Protocol, Partitions) {
  EvalConfig all_but_1;
  const std::vector<ItemIndex> abc{1, 4, 6};
  const auto p = protocol_partition(abc, all_but_1, 3);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->input.size(), 2u);
  EXPECT_EQ(p->measurement.size(), 1u);

  const std::vector<ItemIndex> single{9};
  const auto q = protocol_partition(single, all_but_1, 3);
  ASSERT_TRUE(q);
  EXPECT_TRUE(q->input.empty());
  EXPECT_EQ(q->measurement, single);

  all_but_1.min_preferred = 2;
  EXPECT_FALSE(protocol_partition(single, all_but_1, 3));

  EvalConfig given5;
  parse_protocol("given5", given5);
  const std::vector<ItemIndex> ab{1, 2};
  EXPECT_FALSE(protocol_partition(ab, given5, 3));
  const std::vector<ItemIndex> six{0, 1, 2, 3, 4, 5};
  const auto r = protocol_partition(six, given5, 3);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->input.size(), 5u);
  EXPECT_EQ(r->measurement.size(), 1u);
  EXPECT_FALSE(protocol_partition({}, EvalConfig{}, 3));
}

TEST(Protocol, PartitionCoversPreferredAndIsSeeded) {
  const std::vector<ItemIndex> pref{2, 3, 5, 7, 11, 13};
  EvalConfig cfg;
  parse_protocol("given2", cfg);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = protocol_partition(pref, cfg, seed);
    const auto b = protocol_partition(pref, cfg, seed);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->input, b->input);
    std::vector<ItemIndex> joined = a->input;
    joined.insert(joined.end(), a->measurement.begin(), a->measurement.end());
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, pref);
  }
}

TEST(CfEvaluate, OracleRecommenderScoresHundred) {
  CaseMatrix test(6, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  const Recommender oracle = [](std::span<const ItemIndex> input) {
    RecommendationList list;
    for (ItemIndex i = 0; i < 6; ++i) {
      if (std::find(input.begin(), input.end(), i) == input.end()) {
        list.entries.push_back({i, 0.0});
      }
    }
    return list;
  };
  EvalConfig cfg;
  const EvalReport r = cf_evaluate(oracle, test, cfg);
  EXPECT_EQ(r.score, 100.0);
  EXPECT_EQ(r.n_users, 3u);
  EXPECT_EQ(r.skipped, 0u);
}

TEST(CfEvaluate, SkipsIneligibleAndThrowsWhenNoneLeft) {
  CaseMatrix test(4, {{0}, {}, {0, 1, 2}});
  const Popularity pop{{0.4, 0.3, 0.2, 0.1}};
  EvalConfig cfg;
  parse_protocol("given2", cfg);
  const EvalReport r = cf_evaluate(pop, test, cfg);
  EXPECT_EQ(r.n_users, 1u);
  EXPECT_EQ(r.skipped, 2u);
  ASSERT_EQ(r.per_user.size(), 1u);
  EXPECT_EQ(r.per_user[0].user, 2u);
  parse_protocol("given5", cfg);
  EXPECT_THROW(cf_evaluate(pop, test, cfg), EvaluationError);
}

TEST(CfEvaluate, GivenTrialCountsShrinkWithM) {
  const CaseMatrix test = testing::mixture_cases(20, 500, 3, 7);
  const Popularity pop{std::vector<double>(20, 0.5)};
  std::size_t previous = test.size() + 1;
  for (const char* protocol : {"allbut1", "given2", "given5", "given10"}) {
    EvalConfig cfg;
    parse_protocol(protocol, cfg);
    std::size_t users = 0;
    try {
      users = cf_evaluate(pop, test, cfg).n_users;
    } catch (const EvaluationError&) {
    }
    EXPECT_LE(users, previous) << protocol;
    previous = users;
  }
}

TEST(CfEvaluate, SameSeedSameReport) {
  const CaseMatrix test = testing::mixture_cases(15, 300, 3, 9);
  const Popularity pop = popularity(testing::mixture_cases(15, 300, 3, 10));
  EvalConfig cfg;
  parse_protocol("given2", cfg);
  cfg.seed = 77;
  const EvalReport a = cf_evaluate(pop, test, cfg);
  const EvalReport b = cf_evaluate(pop, test, cfg);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.n_users, b.n_users);
  cfg.seed = 78;
  EXPECT_NE(cf_evaluate(pop, test, cfg).score, a.score);
}

TEST(CfEvaluate, ThreadsDoNotChangeResult) {
  const CaseMatrix train = testing::mixture_cases(20, 400, 3, 1);
  const CaseMatrix test = testing::mixture_cases(20, 300, 3, 2);
  const DependencyNetwork dn =
      learn_dependency_network(train, ItemVocabulary::numbered(20), ScoreConfig{});
  EvalConfig one;
  one.seed = 5;
  EvalConfig four = one;
  four.threads = 4;
  const EvalReport a = cf_evaluate(dn, test, one);
  const EvalReport b = cf_evaluate(dn, test, four);
  EXPECT_EQ(a.score, b.score);
  ASSERT_EQ(a.per_user.size(), b.per_user.size());
  for (std::size_t u = 0; u < a.per_user.size(); ++u) {
    EXPECT_EQ(a.per_user[u].utility, b.per_user[u].utility);
  }
}

TEST(CfEvaluate, ParentlessNetworkReducesToBaseline) {
  // Balanced data defeats every split, so the network is all single leaves.
  CaseMatrix train(3);
  for (int rep = 0; rep < 10; ++rep) {
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<ItemIndex> items;
      for (ItemIndex i = 0; i < 3; ++i) {
        if (mask >> i & 1) items.push_back(i);
      }
      train.add_case(items);
    }
    train.add_case({0});
    train.add_case({0, 1});
  }
  const DependencyNetwork dn =
      learn_dependency_network(train, ItemVocabulary::numbered(3), ScoreConfig{});
  ASSERT_TRUE(dn.arcs().empty());
  const CaseMatrix test = testing::mixture_cases(3, 200, 2, 3);
  for (const char* protocol : {"allbut1", "given2"}) {
    EvalConfig cfg;
    parse_protocol(protocol, cfg);
    cfg.seed = 8;
    EXPECT_EQ(cf_evaluate(dn, test, cfg).score,
              cf_evaluate(popularity(train), test, cfg).score);
  }
}

TEST(CfEvaluate, DependencyNetworkBeatsBaselineOnClusteredData) {
  const CaseMatrix train = testing::mixture_cases(25, 3000, 4, 17);
  const CaseMatrix test = testing::mixture_cases(25, 600, 4, 18);
  const DependencyNetwork dn = learn_dependency_network(
      train, ItemVocabulary::numbered(25), ScoreConfig{}, 4);
  EvalConfig cfg;
  cfg.seed = 1;
  EXPECT_GT(cf_evaluate(dn, test, cfg).score,
            cf_evaluate(popularity(train), test, cfg).score);
}

}  // namespace
}  // namespace dnet
