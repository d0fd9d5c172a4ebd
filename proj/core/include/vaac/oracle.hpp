#pragma once

#include <Eigen/Dense>

#include "vaac/features.hpp"
#include "vaac/mdp.hpp"
#include "vaac/policy.hpp"

namespace vaac {

inline constexpr double kDefaultFdStep = 1e-5;

// Values indexed by nonterminal position (MdpModel::nonterminal_states());
// sa matrices are |X_nt| x |U|.
struct ValueSolution {
  Eigen::VectorXd state;
  Eigen::MatrixXd sa;
};

// First moment of the return: (I - gamma P_pi) J = r on nonterminal states,
// J(x,u) = r(x) + gamma sum_y P(y|x,u) J(y).
ValueSolution solve_j(const MdpModel& model, const SoftmaxPolicy& policy);

// Second moment of the return:
//   M(x,u) = r(x)^2 + 2 gamma r(x) (PJ)(x,u) + gamma^2 (PM)(x,u).
// gamma = 1 is the analytic mode; gamma < 1 reuses the same recursion and is
// experimental (see README).
ValueSolution solve_m(const MdpModel& model, const SoftmaxPolicy& policy,
                      const ValueSolution& j);

Eigen::VectorXd variance_from_moments(const Eigen::VectorXd& j_state,
                                      const Eigen::VectorXd& m_state);
Eigen::MatrixXd variance_from_moments(const Eigen::MatrixXd& j_sa,
                                      const Eigen::MatrixXd& m_sa);

// Expected visit counts before termination: q = (I - P_pi^T)^{-1} e(x0);
// the state-action table multiplies by pi. Requires gamma = 1.
Eigen::VectorXd occupancy_state(const MdpModel& model, const SoftmaxPolicy& policy);
Eigen::MatrixXd occupancy(const MdpModel& model, const SoftmaxPolicy& policy);

// Visit counts weighted by the reward collected before arrival:
//   qt = (I - P_pi^T)^{-1} P_pi^T R (I - P_pi^T)^{-1} e(x0),  R = diag(r).
// Requires gamma = 1.
Eigen::VectorXd weighted_occupancy_state(const MdpModel& model, const SoftmaxPolicy& policy);
Eigen::MatrixXd weighted_occupancy(const MdpModel& model, const SoftmaxPolicy& policy);

struct ExactEvaluation {
  double mu = 0.0;
  ValueSolution j, m;
  Eigen::VectorXd v_state;
  Eigen::MatrixXd v_sa;
  Eigen::VectorXd q_state, qtilde_state;
  Eigen::MatrixXd q_sa, qtilde_sa;
  double j0 = 0.0, m0 = 0.0, v0 = 0.0;
  double eta = 0.0;  // j0 - mu * v0
  double q_min = 0.0, qtilde_min = 0.0;
  bool occupancy_positive = false;           // every q(x,u) > 0
  bool weighted_occupancy_positive = false;  // every qt(x,u) > 0 (metric weighting)
};

// Everything the diagnostics need in one pass. Requires gamma = 1.
ExactEvaluation evaluate_exact(const MdpModel& model, const SoftmaxPolicy& policy, double mu);

struct GradientReport {
  double mu = 0.0;
  Eigen::VectorXd grad_j;         // <psi, J>_q
  Eigen::VectorXd term_m;         // <psi, M>_q
  Eigen::VectorXd term_prefix;    // 2 <psi, J>_qt
  Eigen::VectorXd term_baseline;  // -2 J(x0) <psi, J>_q
  Eigen::VectorXd grad_v;         // sum of the three terms above
  Eigen::VectorXd grad_eta;       // grad_j - mu * grad_v
};

// Gradient of eta(theta) = J(x0) - mu V(x0) from the occupancy inner products.
// Requires gamma = 1.
GradientReport exact_gradient(const MdpModel& model, const SoftmaxPolicy& policy, double mu);

// Central difference of eta(theta) through the linear solves (any gamma).
Eigen::VectorXd finite_difference_gradient(const MdpModel& model, const SoftmaxPolicy& policy,
                                           double mu, double h = kDefaultFdStep);

// Weighted least squares: w solves (Phi^T D Phi) w = Phi^T D v with
// D = diag(weights_sa). Raises SingularSystemError when the normal matrix is
// rank deficient under the given weighting. values_sa/weights_sa are
// |X_nt| x |U| in feature_matrix() row order.
Eigen::VectorXd projection_weights(const Eigen::MatrixXd& values_sa, const FeatureMap& map,
                                   const SoftmaxPolicy& policy, const MdpModel& model,
                                   const Eigen::MatrixXd& weights_sa);

}  // namespace vaac
