#ifndef DNET_SAMPLER_H_
#define DNET_SAMPLER_H_

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnet/joint.h"
#include "dnet/rng.h"

namespace dnet {

// A set of local distributions p(x_k | pa_k) over discrete variables.
template <class M>
concept ConditionalModel = requires(const M& m, std::size_t k,
                                    std::span<const int> x,
                                    std::span<double> out) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m.states(k) } -> std::convertible_to<int>;
  m.conditional(k, x, out);
  m.initial_distribution(k, out);
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The stationary equations have more than one solution.
class UniquenessError : public OracleError {
 public:
  using OracleError::OracleError;
};

// Row-stochastic M(i, j) = p(x^{t+1} = j | x^t = i) over a StateSpace.
using TransitionMatrix = Eigen::MatrixXd;

// Dense matrices are capped at this many entries (1024 states).
inline constexpr std::size_t kMaxMatrixEntries = std::size_t{1} << 20;
// Empirical joints are tracked only up to this many states.
inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 20;

template <ConditionalModel M>
StateSpace state_space(const M& model) {
  std::vector<int> cards(model.size());
  for (std::size_t k = 0; k < cards.size(); ++k) cards[k] = model.states(k);
  return StateSpace(std::move(cards));
}

namespace detail {
template <ConditionalModel M>
StateSpace guarded_space(const M& model) {
  if (model.size() > 20) {
    throw OracleError("state space too large for an exact transition matrix");
  }
  StateSpace space = state_space(model);
  if (space.size() > kMaxMatrixEntries / space.size()) {
    throw OracleError("state space too large for an exact transition matrix");
  }
  return space;
}
}  // namespace detail

// Resampling of X_k alone: nonzero only between states that agree off k.
template <ConditionalModel M>
TransitionMatrix local_transition_matrix(const M& model, std::size_t k) {
  const StateSpace space = detail::guarded_space(model);
  const auto n = static_cast<Eigen::Index>(space.size());
  TransitionMatrix out = TransitionMatrix::Zero(n, n);
  std::vector<int> x(space.variables());
  std::vector<double> probs(static_cast<std::size_t>(space.cardinality(k)));
  const auto stride = static_cast<Eigen::Index>(space.stride(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    space.decode(static_cast<std::size_t>(i), x);
    model.conditional(k, x, probs);
    const Eigen::Index base = i - x[k] * stride;
    for (int s = 0; s < space.cardinality(k); ++s) {
      out(i, base + s * stride) = probs[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

// M = M^{order[0]} M^{order[1]} ... : one ordered sweep.
template <ConditionalModel M>
TransitionMatrix chain_matrix(const M& model,
                              std::span<const std::size_t> order) {
  const StateSpace space = detail::guarded_space(model);
  std::vector<bool> seen(model.size(), false);
  if (order.size() != model.size()) {
    throw std::invalid_argument("visit order must cover every variable");
  }
  for (std::size_t k : order) {
    if (k >= model.size() || seen[k]) {
      throw std::invalid_argument("visit order must be a permutation");
    }
    seen[k] = true;
  }
  const auto n = static_cast<Eigen::Index>(space.size());
  TransitionMatrix product = TransitionMatrix::Identity(n, n);
  for (std::size_t k : order) {
    product = (product * local_transition_matrix(model, k).sparseView())
                  .eval();
  }
  return product;
}

template <ConditionalModel M>
TransitionMatrix chain_matrix(const M& model) {
  std::vector<std::size_t> order(model.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  return chain_matrix(model, order);
}

bool is_row_stochastic(const TransitionMatrix& m, double tolerance = 1e-12);

// Unique pi with pi M = pi, sum(pi) = 1. Throws UniquenessError when the
// eigenvalue-1 eigenspace is more than one-dimensional.
Eigen::VectorXd exact_stationary(const TransitionMatrix& m);

// Iterates pi <- pi M from `start` (normalized) until the L1 change falls
// below `tolerance`. Throws OracleError if max_iterations is reached.
Eigen::VectorXd power_iteration(const TransitionMatrix& m,
                                Eigen::VectorXd start,
                                double tolerance = 1e-14,
                                std::size_t max_iterations = 1'000'000);

enum class InitPolicy { kZeros, kMarginalRandom };

struct GibbsConfig {
  std::uint64_t seed = 0;
  std::size_t burn_in = 1000;
  std::size_t samples = 10000;  // kept sweeps
  std::size_t thin = 1;         // sweeps per kept sample
  InitPolicy init = InitPolicy::kZeros;
  std::vector<std::size_t> order;  // visit order; empty = index order

  void validate(std::size_t n_variables) const {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (thin < 1) throw std::invalid_argument("thin must be >= 1");
    if (!order.empty()) {
      std::vector<bool> seen(n_variables, false);
      if (order.size() != n_variables) {
        throw std::invalid_argument("visit order must cover every variable");
      }
      for (std::size_t k : order) {
        if (k >= n_variables || seen[k]) {
          throw std::invalid_argument("visit order must be a permutation");
        }
        seen[k] = true;
      }
    }
  }
};

// (variable, state) pairs held fixed during sampling.
using Evidence = std::vector<std::pair<std::size_t, int>>;

// Ordered Gibbs sampler. Initialization draws one uniform per variable in
// index order (kMarginalRandom only), then evidence is clamped; every
// resampled variable consumes exactly one uniform. visit(x) sees the state
// after each kept sweep.
template <ConditionalModel M, class Visitor>
void ordered_gibbs(const M& model, const GibbsConfig& cfg,
                   const Evidence& evidence, Visitor&& visit) {
  const std::size_t n = model.size();
  cfg.validate(n);
  std::vector<std::size_t> order = cfg.order;
  if (order.empty()) {
    order.resize(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
  }
  int max_r = 1;
  for (std::size_t k = 0; k < n; ++k) max_r = std::max(max_r, model.states(k));
  std::vector<double> probs(static_cast<std::size_t>(max_r));
  std::vector<int> x(n, 0);
  std::vector<char> clamped(n, 0);
  Rng rng(cfg.seed);

  if (cfg.init == InitPolicy::kMarginalRandom) {
    for (std::size_t k = 0; k < n; ++k) {
      std::span<double> p(probs.data(), static_cast<std::size_t>(model.states(k)));
      model.initial_distribution(k, p);
      x[k] = static_cast<int>(rng.categorical(p));
    }
  }
  for (const auto& [k, state] : evidence) {
    if (k >= n || state < 0 || state >= model.states(k)) {
      throw std::invalid_argument("evidence outside the model");
    }
    x[k] = state;
    clamped[k] = 1;
  }

  auto sweep = [&] {
    for (std::size_t k : order) {
      if (clamped[k]) continue;
      std::span<double> p(probs.data(), static_cast<std::size_t>(model.states(k)));
      model.conditional(k, x, p);
      x[k] = static_cast<int>(rng.categorical(p));
    }
  };
  for (std::size_t s = 0; s < cfg.burn_in; ++s) sweep();
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    for (std::size_t t = 0; t < cfg.thin; ++t) sweep();
    visit(std::span<const int>(x));
  }
}

struct GibbsResult {
  std::vector<std::vector<double>> marginals;  // [variable][state]
  std::optional<Eigen::VectorXd> joint;        // small state spaces only
  std::size_t kept = 0;
};

template <ConditionalModel M>
GibbsResult gibbs_estimate(const M& model, const GibbsConfig& cfg,
                           const Evidence& evidence) {
  const std::size_t n = model.size();
  GibbsResult result;
  result.marginals.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.marginals[k].assign(static_cast<std::size_t>(model.states(k)), 0.0);
  }
  std::optional<StateSpace> space;
  if (n <= 40) {
    StateSpace s = state_space(model);
    if (s.size() <= kMaxJointStates) {
      result.joint = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
      space = std::move(s);
    }
  }
  ordered_gibbs(model, cfg, evidence, [&](std::span<const int> x) {
    for (std::size_t k = 0; k < n; ++k) {
      result.marginals[k][static_cast<std::size_t>(x[k])] += 1.0;
    }
    if (space) (*result.joint)(static_cast<Eigen::Index>(space->encode(x))) += 1.0;
    ++result.kept;
  });
  const double kept = static_cast<double>(result.kept);
  for (auto& m : result.marginals) {
    for (double& v : m) v /= kept;
  }
  if (result.joint) *result.joint /= kept;
  return result;
}

template <ConditionalModel M>
GibbsResult ordered_gibbs_run(const M& model, const GibbsConfig& cfg) {
  return gibbs_estimate(model, cfg, {});
}

// Empirical distribution of `targets` (mixed radix, targets[0] most
// significant) with evidence clamped.
template <ConditionalModel M>
Eigen::VectorXd gibbs_conditional(const M& model, const Evidence& evidence,
                                  std::span<const std::size_t> targets,
                                  const GibbsConfig& cfg) {
  std::vector<int> cards;
  for (std::size_t t : targets) {
    if (t >= model.size()) throw std::invalid_argument("target outside model");
    cards.push_back(model.states(t));
  }
  const StateSpace space(std::move(cards));
  if (space.size() > kMaxJointStates) {
    throw OracleError("target state space too large");
  }
  Eigen::VectorXd counts =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  std::vector<int> sub(targets.size());
  std::size_t kept = 0;
  ordered_gibbs(model, cfg, evidence, [&](std::span<const int> x) {
    for (std::size_t q = 0; q < targets.size(); ++q) sub[q] = x[targets[q]];
    counts(static_cast<Eigen::Index>(space.encode(sub))) += 1.0;
    ++kept;
  });
  return counts / static_cast<double>(kept);
}

}  // namespace dnet

#endif  // DNET_SAMPLER_H_
