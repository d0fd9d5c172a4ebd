#pragma once

#include <Eigen/Dense>
#include <random>

#include "vaac/critic.hpp"

namespace vaac {

inline constexpr double kDefaultThetaMax = 15.0;

// Two-timescale power schedules: alpha(i) = c_alpha / (i+1)^e_alpha for the
// critic, beta(i) = c_beta / (i+1)^e_beta for the actor. Exponents must
// satisfy 0.5 < e_alpha < e_beta <= 1: both sums diverge, both squared sums
// converge, and beta/alpha -> 0 so the actor moves on the slow timescale.
struct StepSchedule {
  double c_alpha = 0.25;
  double c_beta = 1.25;
  double e_alpha = 0.6;
  double e_beta = 1.0;

  double alpha(long long episode) const;
  double beta(long long episode) const;
  void validate() const;  // ContractError on violation
};

// Single-trajectory gradient estimate of eta = J(x0) - mu V(x0):
//   sum_t psi(x_t,u_t) [ phi_j.w_j
//                        - mu ( phi_m.w_m + 2 C_t phi_j.w_tilde - 2 j0 phi_j.w_j ) ]
// with C_t the reward collected before step t. The prefix factor converts
// visit-count sampling into the prefix-weighted occupancy that the variance
// gradient needs; dropping it biases the estimate.
Eigen::VectorXd actor_gradient_estimate(const Trajectory& trajectory, const CriticState& critic,
                                        const FeatureMap& map_j, const FeatureMap& map_m,
                                        const SoftmaxPolicy& policy, double mu);

struct ActorStepResult {
  Eigen::VectorXd theta;
  bool clamped = false;
};

// theta' = clamp(theta + beta * grad, [-theta_max, theta_max]) componentwise.
ActorStepResult actor_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                           double beta, double theta_max = kDefaultThetaMax);

struct UnbiasednessReport {
  Eigen::VectorXd mean_estimate, oracle_grad, standard_error, z;
  long long episodes = 0;
  bool pass = false;  // every |z| < 3 (exact match when the estimate is degenerate)
};

// Monte Carlo mean of the estimator with the critic pinned at its oracle fixed
// point, compared componentwise against exact_gradient.
UnbiasednessReport unbiasedness_check(const MdpModel& model, const SoftmaxPolicy& policy,
                                      double mu, long long episodes, std::mt19937_64& rng);

}  // namespace vaac
