#ifndef DNET_EVALUATE_H_
#define DNET_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dnet/data.h"
#include "dnet/network.h"
#include "dnet/recommend.h"

namespace dnet {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Protocol { kAllBut1, kGiven };

struct EvalConfig {
  Protocol protocol = Protocol::kAllBut1;
  std::size_t given = 0;       // m for given-m
  double half_life = 5.0;      // a
  std::uint64_t seed = 0;
  std::size_t min_preferred = 1;  // all-but-1 eligibility floor
  unsigned threads = 1;

  void validate() const;
  std::string protocol_name() const;
};

// Parses "allbut1", "given2", "given5", "given10", ... into cfg.
void parse_protocol(std::string_view name, EvalConfig& cfg);

// 2^(-k / a).
double position_probability(std::size_t k, double half_life);

// Half-life utility of `list` for `measurement`, normalized by the utility
// of a list with every measurement item at the top. Throws
// std::invalid_argument for an empty measurement set.
double user_score(const RecommendationList& list,
                  std::span<const ItemIndex> measurement, double half_life);

struct Partition {
  std::vector<ItemIndex> input;
  std::vector<ItemIndex> measurement;
};

// Random input/measurement split of one user's preferred items; nullopt
// when the user is ineligible under the protocol.
std::optional<Partition> protocol_partition(std::span<const ItemIndex> preferred,
                                            const EvalConfig& cfg,
                                            std::uint64_t user_seed);

struct UserResult {
  std::size_t user = 0;
  std::size_t measured = 0;  // K_i
  double utility = 0.0;
};

struct EvalReport {
  double score = 0.0;  // 100 * mean utility
  std::size_t n_users = 0;
  std::size_t skipped = 0;
  std::vector<UserResult> per_user;
};

using Recommender =
    std::function<RecommendationList(std::span<const ItemIndex> input)>;

// Partition seeds are derive_seed(cfg.seed, user ordinal). Throws
// EvaluationError when no user is eligible.
EvalReport cf_evaluate(const Recommender& model, const CaseMatrix& test,
                       const EvalConfig& cfg);
EvalReport cf_evaluate(const DependencyNetwork& dn, const CaseMatrix& test,
                       const EvalConfig& cfg);
EvalReport cf_evaluate(const Popularity& baseline, const CaseMatrix& test,
                       const EvalConfig& cfg);

}  // namespace dnet

#endif  // DNET_EVALUATE_H_
