#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "vaac/actor.hpp"
#include "vaac/mdp.hpp"
#include "vaac/oracle.hpp"

namespace vaac {

struct ExperimentConfig {
  std::string model_path;
  double mu = 0.2;
  double gamma = 1.0;
  StepSchedule schedule;
  long long episodes = 200000;
  std::uint64_t seed = 1;
  double reward_baseline = 0.0;
  std::vector<double> theta_init;  // empty = zeros
  long long eval_every = 1000;
  std::string output_path;
  int max_episode_steps = kDefaultMaxEpisodeSteps;
  double theta_max = kDefaultThetaMax;
};

// Strict parse: unknown keys are rejected so typos cannot silently fall back
// to defaults. "theta_init" accepts an array or the string "zeros".
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct TrainingRecord {
  long long episode = 0;  // episodes completed when the record was taken
  double eta = 0.0, j0_est = 0.0, j_oracle = 0.0, v_oracle = 0.0;
  double grad_norm = 0.0;   // Euclidean norm of the oracle gradient of eta
  double critic_gap = 0.0;  // max-norm distance to the oracle fixed point
  long long clamp_events = 0;  // clamp count since the previous record
  Eigen::VectorXd theta;
};

struct TrainingHistory {
  std::vector<TrainingRecord> records;
  Eigen::VectorXd final_theta;
  int param_count = 0;
};

// Adds the baseline to every nonterminal reward (terminal stays 0). Training
// and the oracle diagnostics both see the shifted model.
MdpModel with_reward_baseline(const MdpModel& model, double baseline);

// Episodic actor-critic loop: per episode one critic update and one actor step
// (the actor uses the episode-start critic), oracle diagnostics every
// eval_every episodes and at the final episode. Requires gamma = 1 and a model
// that passes validate_model. Bitwise reproducible for a fixed config.
TrainingHistory run_training(const MdpModel& model, const ExperimentConfig& config);

// CSV export, header
//   episode,eta,J0_est,J_oracle,V_oracle,grad_norm,critic_gap,clamped,theta_0..theta_{n-1}
// with floats at 17 significant digits so a reload is bit-exact.
void export_history(const TrainingHistory& history, const std::string& path);

struct GradCheckItem {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct GradCheckReport {
  std::vector<GradCheckItem> items;
  bool all_pass = false;
};

struct GradCheckHooks {
  // Test hook: corrupt the oracle evaluation before the consistency checks to
  // prove the checks can fail.
  std::function<void(ExactEvaluation&)> tamper;
};

// Cross-validates the gradient pipeline on one model: finite differences vs
// the exact gradient, the gradient recomputed from projected values, and the
// Monte Carlo estimator mean (capped at 200000 episodes).
GradCheckReport grad_check(const MdpModel& model, const ExperimentConfig& config,
                           const GradCheckHooks& hooks = {});

// Oracle summary for the eval subcommand. gamma < 1 reports moments only and
// flags the output as experimental.
nlohmann::json eval_report(const MdpModel& model, const ExperimentConfig& config);

}  // namespace vaac
