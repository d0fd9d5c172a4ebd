#pragma once

#include <Eigen/Dense>

#include "vaac/features.hpp"
#include "vaac/oracle.hpp"
#include "vaac/simulate.hpp"

namespace vaac {

// Linear critics for the first and second moment of the return, the
// prefix-weighted first-moment critic, and the scalar return estimate at x0.
struct CriticState {
  Eigen::VectorXd w_j, w_m, w_tilde_j;
  double j0 = 0.0;
  long long episode_index = 0;
};

CriticState make_critic_state(const FeatureMap& map_j, const FeatureMap& map_m);

// One episode of least-squares return regression, undiscounted:
//   w_j     += alpha * sum_t (G_t - w_j.phi_j(t)) phi_j(t)
//   w_m     += alpha * sum_t (G_t^2 - w_m.phi_m(t)) phi_m(t)
//   w_tilde += alpha * sum_{t>=1} C_t (G_t - w_tilde.phi_j(t)) phi_j(t)
//   j0      += alpha * (B - j0)
// with suffix returns G, reward prefixes C and episode return B. Residuals use
// the weights passed in (the episode-start iterate); the summed correction is
// applied once.
CriticState critic_update(const CriticState& state, const Trajectory& trajectory,
                          const FeatureMap& map_j, const FeatureMap& map_m,
                          const SoftmaxPolicy& policy, double alpha);

struct CriticFixedPoint {
  Eigen::VectorXd w_j, w_m, w_tilde_j;
  double j0 = 0.0;
};

// Where the updates settle in expectation: projection weights of J and M under
// the visit weights, of J under the prefix-weighted visits, and J(x0).
CriticFixedPoint critic_fixed_point(const MdpModel& model, const SoftmaxPolicy& policy,
                                    const FeatureMap& map_j, const FeatureMap& map_m);

// Max-norm distance over (w_j, w_m, w_tilde_j, j0).
double critic_fixed_point_gap(const CriticState& state, const CriticFixedPoint& target);

}  // namespace vaac
