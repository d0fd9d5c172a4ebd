#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vaac/mdp.hpp"
#include "vaac/policy.hpp"

namespace vaac {

inline constexpr double kRankTolerance = 1e-10;

enum class FeatureKind { kCompatible, kCompatibleAugmented };

// State-action feature map, evaluated at the policy's current parameters.
// Maps must vanish at the terminal state so episode sums can stop at tau - 1.
struct FeatureMap {
  std::function<Eigen::VectorXd(const SoftmaxPolicy&, int state, int action)> phi;
  int dim = 0;
  FeatureKind kind = FeatureKind::kCompatible;
};

// phi = score of the policy; dim equals param_count().
FeatureMap compatible_features(const SoftmaxPolicy& policy);

// Score features with extra user features appended after the score block.
// The extra block is also zeroed at the terminal state.
FeatureMap augmented_features(const SoftmaxPolicy& policy,
                              std::function<Eigen::VectorXd(int state, int action)> extra,
                              int extra_dim);

// One row per (nonterminal state, action): states in nonterminal_states()
// order, actions fastest. Row layout shared by occupancies and projections.
Eigen::MatrixXd feature_matrix(const FeatureMap& map, const SoftmaxPolicy& policy,
                               const MdpModel& model);

struct RankReport {
  int rank = 0;
  int dim = 0;
  bool deficient = false;
  Eigen::VectorXd singular_values;
};

// Rank of the feature matrix at the current parameters via SVD with relative
// tolerance kRankTolerance. dim == 0 is reported deficient: nothing to learn.
RankReport check_rank(const FeatureMap& map, const SoftmaxPolicy& policy,
                      const MdpModel& model);

}  // namespace vaac
