#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dnet/joint.h"

namespace dnet {

StateSpace::StateSpace(std::vector<int> cardinalities)
    : cardinalities_(std::move(cardinalities)),
      strides_(cardinalities_.size()) {
  for (std::size_t k = cardinalities_.size(); k-- > 0;) {
    if (cardinalities_[k] < 1) {
      throw std::invalid_argument("variable needs at least one state");
    }
    strides_[k] = size_;
    const auto card = static_cast<std::size_t>(cardinalities_[k]);
    if (size_ > (std::size_t{1} << 62) / card) {
      throw std::overflow_error("state space size overflows");
    }
    size_ *= card;
  }
}

std::size_t StateSpace::encode(std::span<const int> x) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < cardinalities_.size(); ++k) {
    index += static_cast<std::size_t>(x[k]) * strides_[k];
  }
  return index;
}

void StateSpace::decode(std::size_t index, std::span<int> x) const {
  for (std::size_t k = 0; k < cardinalities_.size(); ++k) {
    x[k] = state_of(index, k);
  }
}

ExplicitJoint::ExplicitJoint(StateSpace space_in, Eigen::VectorXd probs_in)
    : space(std::move(space_in)), probs(std::move(probs_in)) {
  if (space.variables() > kMaxVariables) {
    throw std::invalid_argument("explicit joints are limited to " +
                                std::to_string(kMaxVariables) + " variables");
  }
  if (static_cast<std::size_t>(probs.size()) != space.size()) {
    throw std::invalid_argument("probability vector does not match states");
  }
  if (!(probs.array() > 0.0).all()) {
    throw std::invalid_argument("joint must be strictly positive");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("joint must sum to 1");
  }
}

ConditionalTableNetwork::ConditionalTableNetwork(
    StateSpace space, std::vector<LocalTable> locals,
    std::vector<Eigen::VectorXd> initial)
    : space_(std::move(space)),
      locals_(std::move(locals)),
      initial_(std::move(initial)) {
  if (locals_.size() != space_.variables()) {
    throw std::invalid_argument("one local table per variable required");
  }
  for (std::size_t k = 0; k < locals_.size(); ++k) {
    const LocalTable& t = locals_[k];
    if (!std::is_sorted(t.parents.begin(), t.parents.end()) ||
        std::adjacent_find(t.parents.begin(), t.parents.end()) !=
            t.parents.end()) {
      throw std::invalid_argument("parents must be sorted and distinct");
    }
    std::size_t rows = 1;
    for (ItemIndex p : t.parents) {
      if (p >= space_.variables() || p == k) {
        throw std::invalid_argument("invalid parent for variable " +
                                    std::to_string(k));
      }
      rows *= static_cast<std::size_t>(space_.cardinality(p));
    }
    if (static_cast<std::size_t>(t.probs.rows()) != rows ||
        t.probs.cols() != space_.cardinality(k)) {
      throw std::invalid_argument("local table shape mismatch for variable " +
                                  std::to_string(k));
    }
    if ((t.probs.array() < 0.0).any() ||
        ((t.probs.rowwise().sum().array() - 1.0).abs() > 1e-12).any()) {
      throw std::invalid_argument("local table rows must be distributions");
    }
  }
  if (initial_.empty()) {
    for (const LocalTable& t : locals_) {
      initial_.push_back(t.probs.colwise().mean().transpose());
    }
  } else if (initial_.size() != locals_.size()) {
    throw std::invalid_argument("one initial distribution per variable");
  }
}

ParentSets ConditionalTableNetwork::parent_sets() const {
  ParentSets out;
  for (const LocalTable& t : locals_) out.push_back(t.parents);
  return out;
}

std::size_t ConditionalTableNetwork::row_of(std::size_t k,
                                            std::span<const int> x) const {
  std::size_t row = 0;
  for (ItemIndex p : locals_[k].parents) {
    row = row * static_cast<std::size_t>(space_.cardinality(p)) +
          static_cast<std::size_t>(x[p]);
  }
  return row;
}

void ConditionalTableNetwork::conditional(std::size_t k,
                                          std::span<const int> x,
                                          std::span<double> out) const {
  const auto row = static_cast<Eigen::Index>(row_of(k, x));
  for (int s = 0; s < space_.cardinality(k); ++s) {
    out[s] = locals_[k].probs(row, s);
  }
}

void ConditionalTableNetwork::initial_distribution(
    std::size_t k, std::span<double> out) const {
  for (int s = 0; s < space_.cardinality(k); ++s) out[s] = initial_[k](s);
}

LocalTable conditional_table(const ExplicitJoint& joint, std::size_t child,
                             std::vector<ItemIndex> parents) {
  const StateSpace& space = joint.space;
  std::size_t rows = 1;
  for (ItemIndex p : parents) {
    rows *= static_cast<std::size_t>(space.cardinality(p));
  }
  Eigen::MatrixXd table =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                            space.cardinality(child));
  for (std::size_t s = 0; s < space.size(); ++s) {
    std::size_t row = 0;
    for (ItemIndex p : parents) {
      row = row * static_cast<std::size_t>(space.cardinality(p)) +
            static_cast<std::size_t>(space.state_of(s, p));
    }
    table(static_cast<Eigen::Index>(row), space.state_of(s, child)) +=
        joint.probs(static_cast<Eigen::Index>(s));
  }
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    table.row(r) /= table.row(r).sum();
  }
  return LocalTable{std::move(parents), std::move(table)};
}

namespace {

// True when p(x_child | parents) == p(x_child | parents \ {dropped}) at
// every configuration.
bool independent_of(const ExplicitJoint& joint, std::size_t child,
                    const std::vector<ItemIndex>& parents,
                    std::size_t dropped, double tolerance) {
  const LocalTable full = conditional_table(joint, child, parents);
  std::vector<ItemIndex> rest = parents;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(dropped));
  const LocalTable reduced = conditional_table(joint, child, rest);

  const StateSpace& space = joint.space;
  std::vector<int> config(parents.size(), 0);
  for (Eigen::Index row = 0; row < full.probs.rows(); ++row) {
    std::size_t rem = static_cast<std::size_t>(row);
    for (std::size_t q = parents.size(); q-- > 0;) {
      const auto card = static_cast<std::size_t>(space.cardinality(parents[q]));
      config[q] = static_cast<int>(rem % card);
      rem /= card;
    }
    std::size_t reduced_row = 0;
    for (std::size_t q = 0; q < parents.size(); ++q) {
      if (q == dropped) continue;
      reduced_row = reduced_row * static_cast<std::size_t>(
                                      space.cardinality(parents[q])) +
                    static_cast<std::size_t>(config[q]);
    }
    const auto diff =
        (full.probs.row(row) -
         reduced.probs.row(static_cast<Eigen::Index>(reduced_row)))
            .cwiseAbs()
            .maxCoeff();
    if (diff > tolerance) return false;
  }
  return true;
}

}  // namespace

ConditionalTableNetwork consistent_dn_from_joint(const ExplicitJoint& joint,
                                                 double tolerance) {
  if (!(joint.probs.array() > 0.0).all()) {
    throw std::invalid_argument("joint must be strictly positive");
  }
  const StateSpace& space = joint.space;
  const std::size_t n = space.variables();
  std::vector<LocalTable> locals;
  std::vector<Eigen::VectorXd> marginals;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ItemIndex> parents;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) parents.push_back(static_cast<ItemIndex>(j));
    }
    bool removed = true;
    while (removed) {
      removed = false;
      for (std::size_t q = 0; q < parents.size(); ++q) {
        if (independent_of(joint, i, parents, q, tolerance)) {
          parents.erase(parents.begin() + static_cast<std::ptrdiff_t>(q));
          removed = true;
          break;
        }
      }
    }
    locals.push_back(conditional_table(joint, i, std::move(parents)));
    marginals.push_back(conditional_table(joint, i, {}).probs.row(0).transpose());
  }
  return ConditionalTableNetwork(space, std::move(locals),
                                 std::move(marginals));
}

}  // namespace dnet
