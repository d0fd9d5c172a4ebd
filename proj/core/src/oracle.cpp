#include "vaac/oracle.hpp"

#include <string>

#include "vaac/errors.hpp"

namespace vaac {
namespace {

// Policy-averaged transition matrix restricted to nonterminal states. Mass
// into the terminal state simply leaves the system, which is what makes
// I - P_pi invertible for proper policies.
Eigen::MatrixXd policy_transition(const MdpModel& model, const SoftmaxPolicy& policy) {
  const auto& nt = model.nonterminal_states();
  const int n = model.num_nonterminal();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd pi = policy.action_distribution(nt[i]);
    for (int u = 0; u < model.num_actions(); ++u) {
      for (int j = 0; j < n; ++j) {
        p(i, j) += pi[u] * model.transition_prob(nt[i], u, nt[j]);
      }
    }
  }
  return p;
}

Eigen::VectorXd nonterminal_rewards(const MdpModel& model) {
  const auto& nt = model.nonterminal_states();
  Eigen::VectorXd r(model.num_nonterminal());
  for (int i = 0; i < static_cast<int>(nt.size()); ++i) r[i] = model.reward(nt[i]);
  return r;
}

Eigen::VectorXd solve_regular(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::string& context) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw SingularSystemError(context + ": singular system; non-proper policy suspected");
  return lu.solve(b);
}

void require_undiscounted(const MdpModel& model, const std::string& context) {
  if (model.gamma() != 1.0)
    throw ContractError(context + ": defined for gamma = 1 (occupancy-based analysis)");
}

// Spreads a state vector over actions through the model kernel:
// out(x,u) = sum_y P(y|x,u) values(y), terminal contributing zero.
Eigen::MatrixXd kernel_apply(const MdpModel& model, const Eigen::VectorXd& values) {
  const auto& nt = model.nonterminal_states();
  const int n = model.num_nonterminal();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, model.num_actions());
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < model.num_actions(); ++u) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += model.transition_prob(nt[i], u, nt[j]) * values[j];
      out(i, u) = acc;
    }
  }
  return out;
}

}  // namespace

ValueSolution solve_j(const MdpModel& model, const SoftmaxPolicy& policy) {
  const int n = model.num_nonterminal();
  const double gamma = model.gamma();
  const Eigen::MatrixXd p_pi = policy_transition(model, policy);
  const Eigen::VectorXd r = nonterminal_rewards(model);

  ValueSolution j;
  j.state = solve_regular(Eigen::MatrixXd::Identity(n, n) - gamma * p_pi, r, "solve_j");
  j.sa = (gamma * kernel_apply(model, j.state)).colwise() + r;
  return j;
}

ValueSolution solve_m(const MdpModel& model, const SoftmaxPolicy& policy,
                      const ValueSolution& j) {
  const int n = model.num_nonterminal();
  const double gamma = model.gamma();
  const Eigen::MatrixXd p_pi = policy_transition(model, policy);
  const Eigen::VectorXd r = nonterminal_rewards(model);
  if (j.state.size() != n) throw ContractError("solve_m: J solution has the wrong size");

  // M(x,u) = r^2 + 2 gamma r (PJ)(x,u) + gamma^2 (PM)(x,u); averaging over
  // pi(u|x) closes the system in M_state.
  const Eigen::VectorXd rhs =
      r.array().square().matrix() + 2.0 * gamma * r.cwiseProduct(p_pi * j.state);
  ValueSolution m;
  m.state =
      solve_regular(Eigen::MatrixXd::Identity(n, n) - gamma * gamma * p_pi, rhs, "solve_m");
  m.sa = gamma * gamma * kernel_apply(model, m.state);
  const Eigen::MatrixXd pj = kernel_apply(model, j.state);
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < model.num_actions(); ++u) {
      m.sa(i, u) += r[i] * r[i] + 2.0 * gamma * r[i] * pj(i, u);
    }
  }
  return m;
}

Eigen::VectorXd variance_from_moments(const Eigen::VectorXd& j_state,
                                      const Eigen::VectorXd& m_state) {
  if (j_state.size() != m_state.size())
    throw ContractError("variance_from_moments: mismatched shapes");
  return m_state - j_state.cwiseProduct(j_state);
}

Eigen::MatrixXd variance_from_moments(const Eigen::MatrixXd& j_sa, const Eigen::MatrixXd& m_sa) {
  if (j_sa.rows() != m_sa.rows() || j_sa.cols() != m_sa.cols())
    throw ContractError("variance_from_moments: mismatched shapes");
  return m_sa - j_sa.cwiseProduct(j_sa);
}

Eigen::VectorXd occupancy_state(const MdpModel& model, const SoftmaxPolicy& policy) {
  require_undiscounted(model, "occupancy_state");
  const int n = model.num_nonterminal();
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  start[model.nonterminal_index(model.initial_state())] = 1.0;
  const Eigen::MatrixXd a_t =
      Eigen::MatrixXd::Identity(n, n) - policy_transition(model, policy).transpose();
  return solve_regular(a_t, start, "occupancy_state");
}

namespace {

Eigen::MatrixXd spread_over_actions(const MdpModel& model, const SoftmaxPolicy& policy,
                                    const Eigen::VectorXd& state_values) {
  const auto& nt = model.nonterminal_states();
  Eigen::MatrixXd out(model.num_nonterminal(), model.num_actions());
  for (int i = 0; i < model.num_nonterminal(); ++i) {
    out.row(i) = state_values[i] * policy.action_distribution(nt[i]).transpose();
  }
  return out;
}

}  // namespace

Eigen::MatrixXd occupancy(const MdpModel& model, const SoftmaxPolicy& policy) {
  return spread_over_actions(model, policy, occupancy_state(model, policy));
}

Eigen::VectorXd weighted_occupancy_state(const MdpModel& model, const SoftmaxPolicy& policy) {
  require_undiscounted(model, "weighted_occupancy_state");
  const int n = model.num_nonterminal();
  const Eigen::MatrixXd p_pi_t = policy_transition(model, policy).transpose();
  const Eigen::MatrixXd a_t = Eigen::MatrixXd::Identity(n, n) - p_pi_t;
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  start[model.nonterminal_index(model.initial_state())] = 1.0;
  const Eigen::VectorXd q = solve_regular(a_t, start, "weighted_occupancy_state");
  // qt = (I - P^T)^{-1} P^T R q: visits weighted by reward already collected.
  const Eigen::VectorXd pushed = p_pi_t * nonterminal_rewards(model).cwiseProduct(q);
  return solve_regular(a_t, pushed, "weighted_occupancy_state");
}

Eigen::MatrixXd weighted_occupancy(const MdpModel& model, const SoftmaxPolicy& policy) {
  return spread_over_actions(model, policy, weighted_occupancy_state(model, policy));
}

ExactEvaluation evaluate_exact(const MdpModel& model, const SoftmaxPolicy& policy, double mu) {
  require_undiscounted(model, "evaluate_exact");
  ExactEvaluation eval;
  eval.mu = mu;
  eval.j = solve_j(model, policy);
  eval.m = solve_m(model, policy, eval.j);
  eval.v_state = variance_from_moments(eval.j.state, eval.m.state);
  eval.v_sa = variance_from_moments(eval.j.sa, eval.m.sa);
  eval.q_state = occupancy_state(model, policy);
  eval.q_sa = spread_over_actions(model, policy, eval.q_state);
  eval.qtilde_state = weighted_occupancy_state(model, policy);
  eval.qtilde_sa = spread_over_actions(model, policy, eval.qtilde_state);
  const int start = model.nonterminal_index(model.initial_state());
  eval.j0 = eval.j.state[start];
  eval.m0 = eval.m.state[start];
  eval.v0 = eval.m0 - eval.j0 * eval.j0;
  eval.eta = eval.j0 - mu * eval.v0;
  eval.q_min = eval.q_sa.minCoeff();
  eval.qtilde_min = eval.qtilde_sa.minCoeff();
  eval.occupancy_positive = eval.q_min > 0.0;
  eval.weighted_occupancy_positive = eval.qtilde_min > 0.0;
  return eval;
}

GradientReport exact_gradient(const MdpModel& model, const SoftmaxPolicy& policy, double mu) {
  const ExactEvaluation eval = evaluate_exact(model, policy, mu);
  const int n = policy.param_count();
  GradientReport report;
  report.mu = mu;
  report.grad_j = Eigen::VectorXd::Zero(n);
  report.term_m = Eigen::VectorXd::Zero(n);
  report.term_prefix = Eigen::VectorXd::Zero(n);

  const auto& nt = model.nonterminal_states();
  for (int i = 0; i < model.num_nonterminal(); ++i) {
    for (int u = 0; u < model.num_actions(); ++u) {
      const Eigen::VectorXd psi = policy.score(nt[i], u);
      report.grad_j += eval.q_sa(i, u) * eval.j.sa(i, u) * psi;
      report.term_m += eval.q_sa(i, u) * eval.m.sa(i, u) * psi;
      report.term_prefix += 2.0 * eval.qtilde_sa(i, u) * eval.j.sa(i, u) * psi;
    }
  }
  report.term_baseline = -2.0 * eval.j0 * report.grad_j;
  report.grad_v = report.term_m + report.term_prefix + report.term_baseline;
  report.grad_eta = report.grad_j - mu * report.grad_v;
  return report;
}

Eigen::VectorXd finite_difference_gradient(const MdpModel& model, const SoftmaxPolicy& policy,
                                           double mu, double h) {
  if (!(h > 0.0)) throw ContractError("finite_difference_gradient: step must be positive");
  const int n = policy.param_count();
  const int start = model.nonterminal_index(model.initial_state());
  const auto eta_at = [&](const Eigen::VectorXd& theta) {
    const SoftmaxPolicy shifted = policy.with_theta(theta);
    const ValueSolution j = solve_j(model, shifted);
    const ValueSolution m = solve_m(model, shifted, j);
    const double j0 = j.state[start];
    return j0 - mu * (m.state[start] - j0 * j0);
  };

  Eigen::VectorXd grad(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd up = policy.theta();
    Eigen::VectorXd down = policy.theta();
    up[k] += h;
    down[k] -= h;
    grad[k] = (eta_at(up) - eta_at(down)) / (2.0 * h);
  }
  return grad;
}

Eigen::VectorXd projection_weights(const Eigen::MatrixXd& values_sa, const FeatureMap& map,
                                   const SoftmaxPolicy& policy, const MdpModel& model,
                                   const Eigen::MatrixXd& weights_sa) {
  const int n = model.num_nonterminal();
  const int acts = model.num_actions();
  if (values_sa.rows() != n || values_sa.cols() != acts)
    throw ContractError("projection_weights: values table has the wrong shape");
  if (weights_sa.rows() != n || weights_sa.cols() != acts)
    throw ContractError("projection_weights: weights table has the wrong shape");
  if (map.dim == 0) return Eigen::VectorXd(0);

  const Eigen::MatrixXd phi = feature_matrix(map, policy, model);
  Eigen::VectorXd values(n * acts), weights(n * acts);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < acts; ++u, ++row) {
      values[row] = values_sa(i, u);
      weights[row] = weights_sa(i, u);
    }
  }
  const Eigen::MatrixXd weighted = weights.asDiagonal() * phi;
  const Eigen::MatrixXd normal = phi.transpose() * weighted;
  const Eigen::VectorXd rhs = weighted.transpose() * values;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible())
    throw SingularSystemError(
        "projection_weights: rank deficiency under the occupancy weighting");
  return lu.solve(rhs);
}

}  // namespace vaac
