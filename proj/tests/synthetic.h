// Hand-rolled generators shared by the unit, property, and acceptance suites.
#ifndef DNET_TESTS_SYNTHETIC_H_
#define DNET_TESTS_SYNTHETIC_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "dnet/data.h"
#include "dnet/joint.h"
#include "dnet/rng.h"

namespace dnet::testing {

// Strictly positive joint over n binary variables; entries bounded away
// from zero so conditional-independence tests are well conditioned.
inline ExplicitJoint random_positive_joint(std::size_t n, Rng& rng) {
  StateSpace space = StateSpace::binary(n);
  Eigen::VectorXd p(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index s = 0; s < p.size(); ++s) p(s) = 0.05 + rng.uniform();
  p /= p.sum();
  return ExplicitJoint(std::move(space), std::move(p));
}

using Edge = std::pair<ItemIndex, ItemIndex>;

// Positive pairwise Markov field over n binary variables: each pair is an
// edge with probability edge_rate; p ∝ Π node and edge potentials.
inline ExplicitJoint random_markov_joint(std::size_t n, double edge_rate,
                                         Rng& rng, std::vector<Edge>* edges) {
  StateSpace space = StateSpace::binary(n);
  std::vector<Edge> e;
  std::vector<Eigen::Matrix2d> phi;
  for (ItemIndex i = 0; i < n; ++i) {
    for (ItemIndex j = i + 1; j < n; ++j) {
      if (rng.uniform() >= edge_rate) continue;
      e.emplace_back(i, j);
      Eigen::Matrix2d m;
      for (int a = 0; a < 4; ++a) m(a / 2, a % 2) = 0.2 + 1.8 * rng.uniform();
      phi.push_back(m);
    }
  }
  std::vector<double> unary(n);
  for (double& u : unary) u = 0.3 + rng.uniform();
  Eigen::VectorXd p(static_cast<Eigen::Index>(space.size()));
  std::vector<int> x(n);
  for (std::size_t s = 0; s < space.size(); ++s) {
    space.decode(s, x);
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) w *= x[k] ? unary[k] : 1.0;
    for (std::size_t q = 0; q < e.size(); ++q) {
      w *= phi[q](x[e[q].first], x[e[q].second]);
    }
    p(static_cast<Eigen::Index>(s)) = w;
  }
  p /= p.sum();
  if (edges) *edges = e;
  return ExplicitJoint(std::move(space), std::move(p));
}

// Binary table network with random parent sets (not necessarily
// consistent) and conditionals drawn from [0.05, 0.95].
inline ConditionalTableNetwork random_table_network(std::size_t n, Rng& rng) {
  std::vector<LocalTable> locals;
  for (std::size_t k = 0; k < n; ++k) {
    LocalTable t;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k && rng.uniform() < 0.5) t.parents.push_back(static_cast<ItemIndex>(j));
    }
    const Eigen::Index rows = Eigen::Index{1} << t.parents.size();
    t.probs.resize(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double p1 = 0.05 + 0.9 * rng.uniform();
      t.probs(r, 0) = 1.0 - p1;
      t.probs(r, 1) = p1;
    }
    locals.push_back(std::move(t));
  }
  return ConditionalTableNetwork(StateSpace::binary(n), std::move(locals));
}

// X <- Y with p(x=1|y=1)=0.9, p(x=1|y=0)=0.1 and Y parentless at 0.5.
// Variable 0 is X, variable 1 is Y.
inline ConditionalTableNetwork x_from_y_network() {
  LocalTable x{{1}, Eigen::MatrixXd(2, 2)};
  x.probs << 0.9, 0.1,  //
      0.1, 0.9;
  LocalTable y{{}, Eigen::MatrixXd(1, 2)};
  y.probs << 0.5, 0.5;
  return ConditionalTableNetwork(StateSpace::binary(2), {x, y});
}

// 20 cases over two items: ten with both, ten with neither.
inline CaseMatrix perfect_pair_cases() {
  CaseMatrix m(2);
  for (int i = 0; i < 10; ++i) m.add_case({0, 1});
  for (int i = 0; i < 10; ++i) m.add_case({});
  return m;
}

// Mixture of Bernoulli profiles: each case picks one of `clusters`
// profiles and includes item i independently with that profile's rate.
// Item base rates decay geometrically so popularity is skewed. Profiles
// depend only on profile_seed, so train and test sets drawn with different
// `seed`s share a distribution.
inline CaseMatrix mixture_cases(std::size_t n_items, std::size_t n_cases,
                                std::size_t clusters, std::uint64_t seed,
                                std::uint64_t profile_seed = 1234) {
  Rng rng(profile_seed);
  std::vector<std::vector<double>> rates(clusters,
                                         std::vector<double>(n_items));
  for (auto& profile : rates) {
    for (std::size_t i = 0; i < n_items; ++i) {
      const double base = 0.4 * std::pow(0.85, static_cast<double>(i));
      profile[i] = rng.uniform() < 0.3 ? std::min(0.9, base * 4 + 0.2)
                                       : base * rng.uniform();
    }
  }
  rng = Rng(seed);
  CaseMatrix m(n_items);
  for (std::size_t c = 0; c < n_cases; ++c) {
    const auto& profile = rates[rng.below(clusters)];
    std::vector<ItemIndex> items;
    for (std::size_t i = 0; i < n_items; ++i) {
      if (rng.uniform() < profile[i]) items.push_back(static_cast<ItemIndex>(i));
    }
    m.add_case(std::move(items));
  }
  return m;
}

}  // namespace dnet::testing

#endif  // DNET_TESTS_SYNTHETIC_H_
