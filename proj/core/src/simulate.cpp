#include "vaac/simulate.hpp"

#include <sstream>

#include "vaac/errors.hpp"

namespace vaac {

double canonical_uniform(std::mt19937_64& rng) {
  // Top 53 bits of one draw: every platform with the same engine stream gets
  // the same double, which std::uniform_real_distribution does not promise.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

int sample_index(const Eigen::VectorXd& weights, std::mt19937_64& rng) {
  const double u = canonical_uniform(rng);
  double cumulative = 0.0;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  // Rounding can leave the cumulative sum a hair below 1; charge the tail.
  return n - 1;
}

}  // namespace

Trajectory simulate_episode(const MdpModel& model, const SoftmaxPolicy& policy,
                            std::mt19937_64& rng, int max_steps) {
  if (max_steps < 1) throw ContractError("simulate_episode: max_steps must be positive");
  Trajectory trajectory;
  int state = model.initial_state();
  while (!model.is_terminal(state)) {
    if (trajectory.tau() >= max_steps) {
      std::ostringstream msg;
      msg << "simulate_episode: episode exceeded " << max_steps
          << " steps; non-proper policy suspected";
      throw SimulationError(msg.str());
    }
    const int action = sample_index(policy.action_distribution(state), rng);
    trajectory.steps.push_back({state, action, model.reward(state)});
    state = sample_index(model.transitions(action).row(state).transpose(), rng);
  }
  return trajectory;
}

ReturnSummary discounted_return(const Trajectory& trajectory, double gamma) {
  const int tau = trajectory.tau();
  ReturnSummary summary;
  summary.suffix = Eigen::VectorXd::Zero(tau);
  summary.prefix = Eigen::VectorXd::Zero(tau);
  for (int t = tau - 1; t >= 0; --t) {
    summary.suffix[t] = trajectory.steps[t].reward +
                        (t + 1 < tau ? gamma * summary.suffix[t + 1] : 0.0);
  }
  for (int t = 1; t < tau; ++t) {
    summary.prefix[t] = summary.prefix[t - 1] + trajectory.steps[t - 1].reward;
  }
  summary.total = tau > 0 ? summary.suffix[0] : 0.0;
  return summary;
}

}  // namespace vaac
