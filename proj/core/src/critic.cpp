#include "vaac/critic.hpp"

#include <cmath>
#include <sstream>

#include "vaac/errors.hpp"

namespace vaac {

CriticState make_critic_state(const FeatureMap& map_j, const FeatureMap& map_m) {
  CriticState state;
  state.w_j = Eigen::VectorXd::Zero(map_j.dim);
  state.w_m = Eigen::VectorXd::Zero(map_m.dim);
  state.w_tilde_j = Eigen::VectorXd::Zero(map_j.dim);
  state.j0 = 0.0;
  state.episode_index = 0;
  return state;
}

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

CriticState critic_update(const CriticState& state, const Trajectory& trajectory,
                          const FeatureMap& map_j, const FeatureMap& map_m,
                          const SoftmaxPolicy& policy, double alpha) {
  if (!(alpha > 0.0)) throw ContractError("critic_update: alpha must be positive");
  if (state.w_j.size() != map_j.dim || state.w_tilde_j.size() != map_j.dim ||
      state.w_m.size() != map_m.dim)
    throw ContractError("critic_update: weight sizes disagree with the feature maps");

  const ReturnSummary ret = discounted_return(trajectory, 1.0);
  Eigen::VectorXd dw_j = Eigen::VectorXd::Zero(map_j.dim);
  Eigen::VectorXd dw_m = Eigen::VectorXd::Zero(map_m.dim);
  Eigen::VectorXd dw_tilde = Eigen::VectorXd::Zero(map_j.dim);

  for (int t = 0; t < trajectory.tau(); ++t) {
    const auto& step = trajectory.steps[t];
    const Eigen::VectorXd phi_j = map_j.phi(policy, step.state, step.action);
    const Eigen::VectorXd phi_m = map_m.phi(policy, step.state, step.action);
    if (phi_j.size() != map_j.dim || phi_m.size() != map_m.dim)
      throw ContractError("critic_update: feature dimension disagrees with the map");
    const double g = ret.suffix[t];
    dw_j += (g - state.w_j.dot(phi_j)) * phi_j;
    dw_m += (g * g - state.w_m.dot(phi_m)) * phi_m;
    if (t >= 1) dw_tilde += ret.prefix[t] * (g - state.w_tilde_j.dot(phi_j)) * phi_j;
  }

  CriticState next = state;
  next.w_j += alpha * dw_j;
  next.w_m += alpha * dw_m;
  next.w_tilde_j += alpha * dw_tilde;
  next.j0 += alpha * (ret.total - next.j0);
  next.episode_index = state.episode_index + 1;

  if (!finite(next.w_j) || !finite(next.w_m) || !finite(next.w_tilde_j) ||
      !std::isfinite(next.j0)) {
    std::ostringstream msg;
    msg << "critic_update: non-finite weights after episode " << next.episode_index
        << " (alpha = " << alpha << "); reduce the critic step size";
    throw DivergenceError(msg.str());
  }
  return next;
}

CriticFixedPoint critic_fixed_point(const MdpModel& model, const SoftmaxPolicy& policy,
                                    const FeatureMap& map_j, const FeatureMap& map_m) {
  const ValueSolution j = solve_j(model, policy);
  const ValueSolution m = solve_m(model, policy, j);
  const Eigen::MatrixXd q_sa = occupancy(model, policy);
  const Eigen::MatrixXd qtilde_sa = weighted_occupancy(model, policy);

  CriticFixedPoint target;
  target.w_j = projection_weights(j.sa, map_j, policy, model, q_sa);
  target.w_m = projection_weights(m.sa, map_m, policy, model, q_sa);
  target.w_tilde_j = projection_weights(j.sa, map_j, policy, model, qtilde_sa);
  target.j0 = j.state[model.nonterminal_index(model.initial_state())];
  return target;
}

double critic_fixed_point_gap(const CriticState& state, const CriticFixedPoint& target) {
  if (state.w_j.size() != target.w_j.size() || state.w_m.size() != target.w_m.size() ||
      state.w_tilde_j.size() != target.w_tilde_j.size())
    throw ContractError("critic_fixed_point_gap: mismatched weight sizes");
  double gap = std::abs(state.j0 - target.j0);
  if (state.w_j.size() > 0)
    gap = std::max(gap, (state.w_j - target.w_j).cwiseAbs().maxCoeff());
  if (state.w_m.size() > 0)
    gap = std::max(gap, (state.w_m - target.w_m).cwiseAbs().maxCoeff());
  if (state.w_tilde_j.size() > 0)
    gap = std::max(gap, (state.w_tilde_j - target.w_tilde_j).cwiseAbs().maxCoeff());
  return gap;
}

}  // namespace vaac
