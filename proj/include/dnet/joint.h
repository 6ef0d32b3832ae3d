#ifndef DNET_JOINT_H_
#define DNET_JOINT_H_

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "dnet/data.h"
#include "dnet/network.h"

namespace dnet {

// Mixed-radix enumeration of full assignments, variable 0 most significant.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<int> cardinalities);
  static StateSpace binary(std::size_t n) {
    return StateSpace(std::vector<int>(n, 2));
  }

  std::size_t variables() const { return cardinalities_.size(); }
  std::size_t size() const { return size_; }
  int cardinality(std::size_t k) const { return cardinalities_[k]; }
  const std::vector<int>& cardinalities() const { return cardinalities_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  std::size_t encode(std::span<const int> x) const;
  void decode(std::size_t index, std::span<int> x) const;
  int state_of(std::size_t index, std::size_t k) const {
    return static_cast<int>((index / strides_[k]) %
                            static_cast<std::size_t>(cardinalities_[k]));
  }

  friend bool operator==(const StateSpace& a, const StateSpace& b) {
    return a.cardinalities_ == b.cardinalities_;
  }

 private:
  std::vector<int> cardinalities_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

// Small positive joint distribution given as a full probability vector.
struct ExplicitJoint {
  static constexpr std::size_t kMaxVariables = 12;

  // Throws std::invalid_argument unless probs is positive, sums to 1
  // within 1e-12, and matches the state space.
  ExplicitJoint(StateSpace space, Eigen::VectorXd probs);

  StateSpace space;
  Eigen::VectorXd probs;
};

// Full conditional table p(x_child | parents): one row per parent
// configuration (mixed radix over `parents`, first most significant), one
// column per child state.
struct LocalTable {
  std::vector<ItemIndex> parents;
  Eigen::MatrixXd probs;
};

// Dependency network whose locals are explicit tables.
class ConditionalTableNetwork {
 public:
  // Rows must be distributions; parents sorted, in range, excluding self.
  // `initial` (optional) gives per-variable starting distributions for
  // random initialization; by default the mean of each table's rows.
  ConditionalTableNetwork(StateSpace space, std::vector<LocalTable> locals,
                          std::vector<Eigen::VectorXd> initial = {});

  std::size_t size() const { return locals_.size(); }
  int states(std::size_t k) const { return space_.cardinality(k); }
  const StateSpace& space() const { return space_; }
  const LocalTable& local(std::size_t k) const { return locals_[k]; }
  ParentSets parent_sets() const;

  std::size_t row_of(std::size_t k, std::span<const int> x) const;
  void conditional(std::size_t k, std::span<const int> x,
                   std::span<double> out) const;
  void initial_distribution(std::size_t k, std::span<double> out) const;

 private:
  StateSpace space_;
  std::vector<LocalTable> locals_;
  std::vector<Eigen::VectorXd> initial_;
};

// p(x_child | parents) computed exactly from the joint.
LocalTable conditional_table(const ExplicitJoint& joint, std::size_t child,
                             std::vector<ItemIndex> parents);

// Minimal consistent network: starts from all other variables as parents
// and drops (in increasing index order, restarting after each removal) any
// parent the child is conditionally independent of given the rest, with
// independence judged at `tolerance`.
ConditionalTableNetwork consistent_dn_from_joint(const ExplicitJoint& joint,
                                                 double tolerance = 1e-12);

}  // namespace dnet

#endif  // DNET_JOINT_H_
