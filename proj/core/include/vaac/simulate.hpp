#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "vaac/mdp.hpp"
#include "vaac/policy.hpp"

namespace vaac {

inline constexpr int kDefaultMaxEpisodeSteps = 100000;

struct TrajectoryStep {
  int state = 0;
  int action = 0;
  double reward = 0.0;  // reward of `state`, collected on leaving it
};

// Episode from the initial state up to (not including) the terminal state.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  int tau() const { return static_cast<int>(steps.size()); }
};

// Samples one episode. Episodes longer than max_steps raise SimulationError:
// a policy that cannot terminate is a modeling bug, not a long episode.
Trajectory simulate_episode(const MdpModel& model, const SoftmaxPolicy& policy,
                            std::mt19937_64& rng, int max_steps = kDefaultMaxEpisodeSteps);

struct ReturnSummary {
  double total = 0.0;      // discounted return of the whole episode
  Eigen::VectorXd suffix;  // suffix[t] = sum_{s>=t} gamma^(s-t) r_s
  Eigen::VectorXd prefix;  // prefix[t] = sum_{s<t} r_s, undiscounted
};

// Per-step suffix returns and undiscounted prefix sums. The prefix column is
// what the episodic second-moment updates weight the t >= 1 terms with; it is
// meaningful for gamma = 1 and reported unconditionally.
ReturnSummary discounted_return(const Trajectory& trajectory, double gamma);

// Uniform double in [0,1) built from the top 53 bits of one engine draw, so
// sampling is identical wherever the mt19937_64 stream is.
double canonical_uniform(std::mt19937_64& rng);

}  // namespace vaac
