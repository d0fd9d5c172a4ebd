#include "vaac/actor.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vaac/errors.hpp"
#include "vaac/features.hpp"

namespace vaac {

double StepSchedule::alpha(long long episode) const {
  return c_alpha / std::pow(static_cast<double>(episode) + 1.0, e_alpha);
}

double StepSchedule::beta(long long episode) const {
  return c_beta / std::pow(static_cast<double>(episode) + 1.0, e_beta);
}

void StepSchedule::validate() const {
  if (!(c_alpha > 0.0) || !(c_beta > 0.0))
    throw ContractError("StepSchedule: step constants must be positive");
  // 0.5 < e_alpha < e_beta <= 1 gives divergent step sums, square-summable
  // steps and beta/alpha -> 0 (the two-timescale separation).
  if (!(e_alpha > 0.5 && e_alpha < e_beta && e_beta <= 1.0))
    throw ContractError("StepSchedule: exponents must satisfy 0.5 < e_alpha < e_beta <= 1");
}

Eigen::VectorXd actor_gradient_estimate(const Trajectory& trajectory, const CriticState& critic,
                                        const FeatureMap& map_j, const FeatureMap& map_m,
                                        const SoftmaxPolicy& policy, double mu) {
  if (critic.w_j.size() != map_j.dim || critic.w_tilde_j.size() != map_j.dim ||
      critic.w_m.size() != map_m.dim)
    throw ContractError("actor_gradient_estimate: critic sizes disagree with the feature maps");

  const ReturnSummary ret = discounted_return(trajectory, 1.0);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.param_count());
  for (int t = 0; t < trajectory.tau(); ++t) {
    const auto& step = trajectory.steps[t];
    const Eigen::VectorXd phi_j = map_j.phi(policy, step.state, step.action);
    const Eigen::VectorXd phi_m = map_m.phi(policy, step.state, step.action);
    const double value_j = critic.w_j.dot(phi_j);
    const double value_m = critic.w_m.dot(phi_m);
    const double value_tilde = critic.w_tilde_j.dot(phi_j);
    // Sampling at visit time t draws (x_t, u_t) from the plain occupancy, so
    // the prefix reward C_t has to multiply the w_tilde term explicitly to
    // reproduce the prefix-weighted occupancy; dropping C_t biases the
    // variance part of the estimate. The J0 correction enters with a minus
    // sign (it subtracts the squared-mean gradient).
    const double adjustment =
        value_m + 2.0 * ret.prefix[t] * value_tilde - 2.0 * critic.j0 * value_j;
    grad += (value_j - mu * adjustment) * policy.score(step.state, step.action);
  }
  return grad;
}

ActorStepResult actor_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                           double beta, double theta_max) {
  if (!(beta > 0.0)) throw ContractError("actor_step: beta must be positive");
  if (!(theta_max > 0.0)) throw ContractError("actor_step: theta_max must be positive");
  if (theta.size() != grad.size())
    throw ContractError("actor_step: gradient size disagrees with theta");
  if (!grad.allFinite()) {
    std::ostringstream msg;
    msg << "actor_step: non-finite gradient estimate (beta = " << beta << ")";
    throw DivergenceError(msg.str());
  }
  ActorStepResult result;
  result.theta = theta + beta * grad;
  for (int i = 0; i < result.theta.size(); ++i) {
    if (result.theta[i] > theta_max) {
      result.theta[i] = theta_max;
      result.clamped = true;
    } else if (result.theta[i] < -theta_max) {
      result.theta[i] = -theta_max;
      result.clamped = true;
    }
  }
  return result;
}

UnbiasednessReport unbiasedness_check(const MdpModel& model, const SoftmaxPolicy& policy,
                                      double mu, long long episodes, std::mt19937_64& rng) {
  if (episodes < 2) throw ContractError("unbiasedness_check: need at least 2 episodes");
  const FeatureMap map = compatible_features(policy);
  const CriticFixedPoint target = critic_fixed_point(model, policy, map, map);
  CriticState critic;
  critic.w_j = target.w_j;
  critic.w_m = target.w_m;
  critic.w_tilde_j = target.w_tilde_j;
  critic.j0 = target.j0;

  const int n = policy.param_count();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n);
  for (long long i = 0; i < episodes; ++i) {
    const Trajectory traj = simulate_episode(model, policy, rng);
    const Eigen::VectorXd estimate = actor_gradient_estimate(traj, critic, map, map, policy, mu);
    // Welford running moments, componentwise.
    const Eigen::VectorXd delta = estimate - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta.cwiseProduct(estimate - mean);
  }

  UnbiasednessReport report;
  report.episodes = episodes;
  report.mean_estimate = mean;
  report.oracle_grad = exact_gradient(model, policy, mu).grad_eta;
  report.standard_error =
      (m2 / (static_cast<double>(episodes - 1) * static_cast<double>(episodes)))
          .cwiseSqrt();
  report.z = Eigen::VectorXd::Zero(n);
  report.pass = true;
  for (int k = 0; k < n; ++k) {
    const double diff = report.mean_estimate[k] - report.oracle_grad[k];
    if (report.standard_error[k] > 0.0) {
      report.z[k] = diff / report.standard_error[k];
    } else {
      // Degenerate estimator (zero variance): demand an exact match.
      report.z[k] = std::abs(diff) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (!(std::abs(report.z[k]) < 3.0)) report.pass = false;
  }
  return report;
}

}  // namespace vaac
