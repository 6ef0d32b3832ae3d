#include "dnet/evaluate.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "dnet/parallel.h"
#include "dnet/rng.h"

namespace dnet {

void EvalConfig::validate() const {
  if (!(half_life > 0.0)) throw std::invalid_argument("half-life must be > 0");
  if (protocol == Protocol::kGiven && given < 1) {
    throw std::invalid_argument("given-m needs m >= 1");
  }
}

std::string EvalConfig::protocol_name() const {
  return protocol == Protocol::kAllBut1 ? "allbut1"
                                        : "given" + std::to_string(given);
}

void parse_protocol(std::string_view name, EvalConfig& cfg) {
  if (name == "allbut1") {
    cfg.protocol = Protocol::kAllBut1;
    cfg.given = 0;
    return;
  }
  constexpr std::string_view kGiven = "given";
  std::size_t m = 0;
  if (name.starts_with(kGiven)) {
    const auto digits = name.substr(kGiven.size());
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), m);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && m >= 1) {
      cfg.protocol = Protocol::kGiven;
      cfg.given = m;
      return;
    }
  }
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

double position_probability(std::size_t k, double half_life) {
  return std::exp2(-static_cast<double>(k) / half_life);
}

double user_score(const RecommendationList& list,
                  std::span<const ItemIndex> measurement, double half_life) {
  if (measurement.empty()) {
    throw std::invalid_argument("user_score needs a nonempty measurement set");
  }
  std::vector<ItemIndex> wanted(measurement.begin(), measurement.end());
  std::sort(wanted.begin(), wanted.end());
  double hits = 0.0;
  for (std::size_t k = 0; k < list.entries.size(); ++k) {
    if (std::binary_search(wanted.begin(), wanted.end(),
                           list.entries[k].item)) {
      hits += position_probability(k, half_life);
    }
  }
  double best = 0.0;
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    best += position_probability(k, half_life);
  }
  return hits / best;
}

std::optional<Partition> protocol_partition(std::span<const ItemIndex> preferred,
                                            const EvalConfig& cfg,
                                            std::uint64_t user_seed) {
  const std::size_t n = preferred.size();
  std::size_t n_input = 0;
  if (cfg.protocol == Protocol::kAllBut1) {
    if (n < std::max<std::size_t>(1, cfg.min_preferred)) return std::nullopt;
    n_input = n - 1;
  } else {
    if (n < cfg.given + 1) return std::nullopt;
    n_input = cfg.given;
  }
  std::vector<ItemIndex> items(preferred.begin(), preferred.end());
  Rng rng(user_seed);
  // Partial Fisher-Yates: the first n_input slots become the input set.
  for (std::size_t k = 0; k < n_input; ++k) {
    std::swap(items[k], items[k + rng.below(n - k)]);
  }
  Partition out;
  out.input.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_input));
  out.measurement.assign(items.begin() + static_cast<std::ptrdiff_t>(n_input),
                         items.end());
  std::sort(out.input.begin(), out.input.end());
  std::sort(out.measurement.begin(), out.measurement.end());
  return out;
}

EvalReport cf_evaluate(const Recommender& model, const CaseMatrix& test,
                       const EvalConfig& cfg) {
  cfg.validate();
  std::vector<std::optional<UserResult>> results(test.size());
  parallel_for(test.size(), cfg.threads, [&](std::size_t u) {
    const auto part =
        protocol_partition(test[u], cfg, derive_seed(cfg.seed, u));
    if (!part) return;
    const RecommendationList list = model(part->input);
    results[u] = UserResult{u, part->measurement.size(),
                            user_score(list, part->measurement, cfg.half_life)};
  });

  EvalReport report;
  double total = 0.0;
  for (auto& r : results) {
    if (!r) {
      ++report.skipped;
      continue;
    }
    total += r->utility;
    report.per_user.push_back(*r);
  }
  report.n_users = report.per_user.size();
  if (report.n_users == 0) {
    throw EvaluationError("no test user is eligible under " +
                          cfg.protocol_name());
  }
  report.score = 100.0 * total / static_cast<double>(report.n_users);
  return report;
}

EvalReport cf_evaluate(const DependencyNetwork& dn, const CaseMatrix& test,
                       const EvalConfig& cfg) {
  if (test.n_items() != dn.size()) {
    throw EvaluationError("test data and model vocabularies differ in size");
  }
  return cf_evaluate(
      [&](std::span<const ItemIndex> input) { return recommend(dn, input); },
      test, cfg);
}

EvalReport cf_evaluate(const Popularity& baseline, const CaseMatrix& test,
                       const EvalConfig& cfg) {
  if (test.n_items() != baseline.probs.size()) {
    throw EvaluationError("test data and popularity vector differ in size");
  }
  return cf_evaluate(
      [&](std::span<const ItemIndex> input) {
        return baseline_recommend(baseline, input);
      },
      test, cfg);
}

}  // namespace dnet
