#include "vaac/features.hpp"

#include <utility>

#include "vaac/errors.hpp"

namespace vaac {

FeatureMap compatible_features(const SoftmaxPolicy& policy) {
  FeatureMap map;
  map.dim = policy.param_count();
  map.kind = FeatureKind::kCompatible;
  map.phi = [](const SoftmaxPolicy& p, int state, int action) -> Eigen::VectorXd {
    if (p.is_terminal(state)) return Eigen::VectorXd::Zero(p.param_count());
    return p.score(state, action);
  };
  return map;
}

FeatureMap augmented_features(const SoftmaxPolicy& policy,
                              std::function<Eigen::VectorXd(int state, int action)> extra,
                              int extra_dim) {
  if (!extra || extra_dim < 1)
    throw ContractError("augmented_features: extra block must be nonempty");
  FeatureMap map;
  map.dim = policy.param_count() + extra_dim;
  map.kind = FeatureKind::kCompatibleAugmented;
  map.phi = [extra = std::move(extra), extra_dim](const SoftmaxPolicy& p, int state,
                                                  int action) -> Eigen::VectorXd {
    const int n = p.param_count();
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n + extra_dim);
    if (p.is_terminal(state)) return phi;
    phi.head(n) = p.score(state, action);
    Eigen::VectorXd tail = extra(state, action);
    if (tail.size() != extra_dim)
      throw ContractError("augmented_features: extra block has the wrong dimension");
    phi.tail(extra_dim) = tail;
    return phi;
  };
  return map;
}

Eigen::MatrixXd feature_matrix(const FeatureMap& map, const SoftmaxPolicy& policy,
                               const MdpModel& model) {
  const int rows = model.num_nonterminal() * model.num_actions();
  Eigen::MatrixXd matrix(rows, map.dim);
  int row = 0;
  for (int x : model.nonterminal_states()) {
    for (int u = 0; u < model.num_actions(); ++u) {
      Eigen::VectorXd phi = map.phi(policy, x, u);
      if (phi.size() != map.dim)
        throw ContractError("feature_matrix: phi dimension disagrees with the map");
      matrix.row(row++) = phi.transpose();
    }
  }
  return matrix;
}

RankReport check_rank(const FeatureMap& map, const SoftmaxPolicy& policy,
                      const MdpModel& model) {
  RankReport report;
  report.dim = map.dim;
  if (map.dim == 0) {
    report.rank = 0;
    report.deficient = true;  // nothing spans anything
    return report;
  }
  const Eigen::MatrixXd matrix = feature_matrix(map, policy, model);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  report.singular_values = svd.singularValues();
  const double top = report.singular_values.size() > 0 ? report.singular_values[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < report.singular_values.size(); ++i) {
    if (report.singular_values[i] > kRankTolerance * top) ++rank;
  }
  if (top == 0.0) rank = 0;
  report.rank = rank;
  report.deficient = rank < report.dim;
  return report;
}

}  // namespace vaac
