#include "vaac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "vaac/critic.hpp"
#include "vaac/errors.hpp"
#include "vaac/features.hpp"
#include "vaac/policy.hpp"
#include "vaac/simulate.hpp"

namespace vaac {
namespace {

using nlohmann::json;

void check_keys(const json& doc, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw IoError("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& value, const std::string& where) {
  if (!value.is_number()) throw IoError("config: " + where + " must be a number");
  return value.get<double>();
}

long long require_count(const json& value, const std::string& where) {
  if (!value.is_number_integer()) throw IoError("config: " + where + " must be an integer");
  const long long count = value.get<long long>();
  if (count < 1) throw IoError("config: " + where + " must be positive");
  return count;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw IoError("config: document must be a JSON object");
  check_keys(doc,
             {"model", "mu", "gamma", "schedule", "episodes", "seed", "reward_baseline",
              "theta_init", "eval_every", "output", "max_episode_steps", "theta_max"},
             "the config document");

  ExperimentConfig config;
  if (!doc.contains("model") || !doc["model"].is_string())
    throw IoError("config: \"model\" must be a path string");
  config.model_path = doc["model"].get<std::string>();

  if (doc.contains("mu")) config.mu = require_number(doc["mu"], "\"mu\"");
  if (config.mu < 0.0) throw IoError("config: \"mu\" must be nonnegative");
  if (doc.contains("gamma")) config.gamma = require_number(doc["gamma"], "\"gamma\"");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0))
    throw IoError("config: \"gamma\" must lie in (0, 1]");

  if (doc.contains("schedule")) {
    const json& schedule = doc["schedule"];
    if (!schedule.is_object()) throw IoError("config: \"schedule\" must be an object");
    check_keys(schedule, {"c_alpha", "c_beta", "e_alpha", "e_beta"}, "\"schedule\"");
    if (schedule.contains("c_alpha"))
      config.schedule.c_alpha = require_number(schedule["c_alpha"], "\"c_alpha\"");
    if (schedule.contains("c_beta"))
      config.schedule.c_beta = require_number(schedule["c_beta"], "\"c_beta\"");
    if (schedule.contains("e_alpha"))
      config.schedule.e_alpha = require_number(schedule["e_alpha"], "\"e_alpha\"");
    if (schedule.contains("e_beta"))
      config.schedule.e_beta = require_number(schedule["e_beta"], "\"e_beta\"");
  }
  try {
    config.schedule.validate();
  } catch (const ContractError& error) {
    throw IoError(std::string("config: ") + error.what());
  }

  if (doc.contains("episodes")) config.episodes = require_count(doc["episodes"], "\"episodes\"");
  if (doc.contains("eval_every"))
    config.eval_every = require_count(doc["eval_every"], "\"eval_every\"");
  if (doc.contains("max_episode_steps"))
    config.max_episode_steps =
        static_cast<int>(require_count(doc["max_episode_steps"], "\"max_episode_steps\""));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() ||
        (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
         doc["seed"].get<long long>() < 0))
      throw IoError("config: \"seed\" must be a nonnegative integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("reward_baseline"))
    config.reward_baseline = require_number(doc["reward_baseline"], "\"reward_baseline\"");
  if (doc.contains("theta_max")) {
    config.theta_max = require_number(doc["theta_max"], "\"theta_max\"");
    if (!(config.theta_max > 0.0)) throw IoError("config: \"theta_max\" must be positive");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw IoError("config: \"output\" must be a path string");
    config.output_path = doc["output"].get<std::string>();
  }
  if (doc.contains("theta_init")) {
    const json& init = doc["theta_init"];
    if (init.is_string()) {
      if (init.get<std::string>() != "zeros")
        throw IoError("config: \"theta_init\" accepts an array or the string \"zeros\"");
    } else if (init.is_array()) {
      for (const auto& entry : init)
        config.theta_init.push_back(require_number(entry, "\"theta_init\" entry"));
    } else {
      throw IoError("config: \"theta_init\" accepts an array or the string \"zeros\"");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& error) {
    throw IoError("config: cannot parse " + path + ": " + error.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["model"] = config.model_path;
  doc["mu"] = config.mu;
  doc["gamma"] = config.gamma;
  doc["schedule"] = {{"c_alpha", config.schedule.c_alpha},
                     {"c_beta", config.schedule.c_beta},
                     {"e_alpha", config.schedule.e_alpha},
                     {"e_beta", config.schedule.e_beta}};
  doc["episodes"] = config.episodes;
  doc["seed"] = config.seed;
  doc["reward_baseline"] = config.reward_baseline;
  if (config.theta_init.empty()) {
    doc["theta_init"] = "zeros";
  } else {
    doc["theta_init"] = config.theta_init;
  }
  doc["eval_every"] = config.eval_every;
  doc["output"] = config.output_path;
  doc["max_episode_steps"] = config.max_episode_steps;
  doc["theta_max"] = config.theta_max;
  return doc;
}

MdpModel with_reward_baseline(const MdpModel& model, double baseline) {
  std::vector<std::string> states, actions;
  for (int x = 0; x < model.num_states(); ++x) states.push_back(model.state_name(x));
  for (int u = 0; u < model.num_actions(); ++u) actions.push_back(model.action_name(u));
  Eigen::VectorXd rewards = model.rewards();
  for (int x : model.nonterminal_states()) rewards[x] += baseline;
  std::vector<Eigen::MatrixXd> transitions;
  for (int u = 0; u < model.num_actions(); ++u) transitions.push_back(model.transitions(u));
  return MdpModel(std::move(states), model.initial_state(), model.terminal_state(),
                  std::move(actions), std::move(rewards), std::move(transitions), model.gamma());
}

namespace {

// Shared entry checks for every config-driven operation.
MdpModel prepare_model(const MdpModel& model, const ExperimentConfig& config,
                       const char* context) {
  if (config.gamma != model.gamma()) {
    std::ostringstream msg;
    msg << context << ": config gamma " << config.gamma << " disagrees with the model's "
        << model.gamma();
    throw ContractError(msg.str());
  }
  MdpModel work = with_reward_baseline(model, config.reward_baseline);
  const ValidationReport report = validate_model(work);
  if (!report.ok()) {
    std::ostringstream msg;
    msg << context << ": model validation failed:";
    for (const auto& violation : report.violations) msg << " " << violation << ";";
    throw ContractError(msg.str());
  }
  return work;
}

SoftmaxPolicy initial_policy(const MdpModel& model, const ExperimentConfig& config) {
  Eigen::VectorXd theta;
  if (!config.theta_init.empty()) {
    theta = Eigen::Map<const Eigen::VectorXd>(config.theta_init.data(),
                                              static_cast<int>(config.theta_init.size()));
  }
  return SoftmaxPolicy(model, theta);
}

}  // namespace

TrainingHistory run_training(const MdpModel& model, const ExperimentConfig& config) {
  config.schedule.validate();
  if (config.gamma != 1.0)
    throw ContractError("run_training: training is defined for gamma = 1");
  if (config.episodes < 1) throw ContractError("run_training: episodes must be positive");
  if (config.eval_every < 1 || config.eval_every > config.episodes)
    throw ContractError("run_training: eval_every must lie in [1, episodes]");
  if (config.mu < 0.0) throw ContractError("run_training: mu must be nonnegative");

  const MdpModel work = prepare_model(model, config, "run_training");
  SoftmaxPolicy policy = initial_policy(work, config);
  const FeatureMap map = compatible_features(policy);
  CriticState critic = make_critic_state(map, map);
  std::mt19937_64 rng(config.seed);

  TrainingHistory history;
  history.param_count = policy.param_count();
  long long clamp_since_last = 0;

  for (long long i = 0; i < config.episodes; ++i) {
    try {
      const Trajectory traj = simulate_episode(work, policy, rng, config.max_episode_steps);
      // The actor sees the critic as it stood when the episode started.
      const Eigen::VectorXd grad = actor_gradient_estimate(traj, critic, map, map, policy, config.mu);
      critic = critic_update(critic, traj, map, map, policy, config.schedule.alpha(i));
      const ActorStepResult step =
          actor_step(policy.theta(), grad, config.schedule.beta(i), config.theta_max);
      if (step.clamped) ++clamp_since_last;
      policy.set_theta(step.theta);
    } catch (const SimulationError& error) {
      throw SimulationError("episode " + std::to_string(i) + ": " + error.what());
    } catch (const DivergenceError& error) {
      throw DivergenceError("episode " + std::to_string(i) + ": " + error.what());
    }

    const bool last = i + 1 == config.episodes;
    if ((i + 1) % config.eval_every == 0 || last) {
      const ExactEvaluation eval = evaluate_exact(work, policy, config.mu);
      const GradientReport grad_report = exact_gradient(work, policy, config.mu);
      const CriticFixedPoint target = critic_fixed_point(work, policy, map, map);
      TrainingRecord record;
      record.episode = i + 1;
      record.eta = eval.eta;
      record.j0_est = critic.j0;
      record.j_oracle = eval.j0;
      record.v_oracle = eval.v0;
      record.grad_norm = grad_report.grad_eta.norm();
      record.critic_gap = critic_fixed_point_gap(critic, target);
      record.clamp_events = clamp_since_last;
      record.theta = policy.theta();
      history.records.push_back(std::move(record));
      clamp_since_last = 0;
    }
  }
  history.final_theta = policy.theta();
  return history;
}

void export_history(const TrainingHistory& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_history: cannot open " + path);
  out << "episode,eta,J0_est,J_oracle,V_oracle,grad_norm,critic_gap,clamped";
  for (int k = 0; k < history.param_count; ++k) out << ",theta_" << k;
  out << "\n";
  for (const auto& record : history.records) {
    out << record.episode << ',' << format_double(record.eta) << ','
        << format_double(record.j0_est) << ',' << format_double(record.j_oracle) << ','
        << format_double(record.v_oracle) << ',' << format_double(record.grad_norm) << ','
        << format_double(record.critic_gap) << ',' << record.clamp_events;
    for (int k = 0; k < history.param_count; ++k) out << ',' << format_double(record.theta[k]);
    out << "\n";
  }
  if (!out) throw IoError("export_history: write failed for " + path);
}

GradCheckReport grad_check(const MdpModel& model, const ExperimentConfig& config,
                           const GradCheckHooks& hooks) {
  if (config.gamma != 1.0)
    throw ContractError("grad_check: gradient verification is defined for gamma = 1");
  const MdpModel work = prepare_model(model, config, "grad_check");
  const SoftmaxPolicy policy = initial_policy(work, config);
  const FeatureMap map = compatible_features(policy);
  GradCheckReport report;

  const GradientReport exact = exact_gradient(work, policy, config.mu);
  {
    const Eigen::VectorXd fd = finite_difference_gradient(work, policy, config.mu);
    const double scale = std::max(exact.grad_eta.lpNorm<Eigen::Infinity>(), 1e-12);
    const double rel =
        policy.param_count() == 0 ? 0.0 : (exact.grad_eta - fd).lpNorm<Eigen::Infinity>() / scale;
    report.items.push_back({"finite differences vs analytic gradient", rel < 1e-6, rel, 1e-6,
                            "max relative error over components"});
  }

  ExactEvaluation eval = evaluate_exact(work, policy, config.mu);
  if (hooks.tamper) hooks.tamper(eval);
  {
    const auto& nt = work.nonterminal_states();
    const int n = policy.param_count();
    Eigen::VectorXd grad_j = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd term_m = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd term_prefix = Eigen::VectorXd::Zero(n);
    if (n > 0) {
      const Eigen::VectorXd w_j = projection_weights(eval.j.sa, map, policy, work, eval.q_sa);
      const Eigen::VectorXd w_m = projection_weights(eval.m.sa, map, policy, work, eval.q_sa);
      const Eigen::VectorXd w_tilde =
          projection_weights(eval.j.sa, map, policy, work, eval.qtilde_sa);
      for (int i = 0; i < work.num_nonterminal(); ++i) {
        for (int u = 0; u < work.num_actions(); ++u) {
          const Eigen::VectorXd phi = map.phi(policy, nt[i], u);
          const Eigen::VectorXd psi = policy.score(nt[i], u);
          grad_j += eval.q_sa(i, u) * w_j.dot(phi) * psi;
          term_m += eval.q_sa(i, u) * w_m.dot(phi) * psi;
          term_prefix += 2.0 * eval.qtilde_sa(i, u) * w_tilde.dot(phi) * psi;
        }
      }
    }
    const double gap_j = n == 0 ? 0.0 : (grad_j - exact.grad_j).lpNorm<Eigen::Infinity>();
    report.items.push_back({"projected J reproduces the J gradient", gap_j < 1e-9, gap_j, 1e-9,
                            "max absolute gap"});
    if (config.mu > 0.0) {
      const Eigen::VectorXd grad_v = term_m + term_prefix - 2.0 * eval.j0 * grad_j;
      const double gap_v = n == 0 ? 0.0 : (grad_v - exact.grad_v).lpNorm<Eigen::Infinity>();
      report.items.push_back({"projected J and M reproduce the variance gradient", gap_v < 1e-9,
                              gap_v, 1e-9, "max absolute gap"});
    }
  }

  {
    const long long episodes = std::max<long long>(2, std::min<long long>(config.episodes, 200000));
    std::mt19937_64 rng(config.seed);
    const UnbiasednessReport ub = unbiasedness_check(work, policy, config.mu, episodes, rng);
    double max_z = 0.0;
    for (int k = 0; k < ub.z.size(); ++k) {
      max_z = std::max(max_z, std::abs(ub.z[k]));
    }
    std::ostringstream detail;
    detail << "componentwise z-scores over " << episodes << " episodes";
    report.items.push_back(
        {"single-trajectory estimator mean matches the gradient", ub.pass, max_z, 3.0,
         detail.str()});
  }

  report.all_pass = true;
  for (const auto& item : report.items) report.all_pass = report.all_pass && item.pass;
  return report;
}

json eval_report(const MdpModel& model, const ExperimentConfig& config) {
  const MdpModel work = prepare_model(model, config, "eval_report");
  const SoftmaxPolicy policy = initial_policy(work, config);

  json out;
  out["mu"] = config.mu;
  out["gamma"] = work.gamma();
  out["theta"] = std::vector<double>(policy.theta().data(),
                                     policy.theta().data() + policy.theta().size());
  out["policy"] = json::object();
  for (int x : work.nonterminal_states()) {
    const Eigen::VectorXd pi = policy.action_distribution(x);
    json row = json::object();
    for (int u = 0; u < work.num_actions(); ++u) row[work.action_name(u)] = pi[u];
    out["policy"][work.state_name(x)] = row;
  }

  if (work.gamma() == 1.0) {
    const ExactEvaluation eval = evaluate_exact(work, policy, config.mu);
    const GradientReport grad = exact_gradient(work, policy, config.mu);
    out["J0"] = eval.j0;
    out["M0"] = eval.m0;
    out["V0"] = eval.v0;
    out["eta"] = eval.eta;
    const auto table = [&](const Eigen::MatrixXd& values) {
      json doc = json::object();
      const auto& nt = work.nonterminal_states();
      for (int i = 0; i < work.num_nonterminal(); ++i) {
        json row = json::object();
        for (int u = 0; u < work.num_actions(); ++u) row[work.action_name(u)] = values(i, u);
        doc[work.state_name(nt[i])] = row;
      }
      return doc;
    };
    out["q"] = table(eval.q_sa);
    out["qtilde"] = table(eval.qtilde_sa);
    out["grad_eta"] =
        std::vector<double>(grad.grad_eta.data(), grad.grad_eta.data() + grad.grad_eta.size());
    const RankReport rank = check_rank(compatible_features(policy), policy, work);
    out["assumptions"] = {{"occupancy_positive", eval.occupancy_positive},
                          {"weighted_occupancy_positive", eval.weighted_occupancy_positive},
                          {"q_min", eval.q_min},
                          {"qtilde_min", eval.qtilde_min},
                          {"feature_rank", rank.rank},
                          {"feature_dim", rank.dim},
                          {"feature_rank_deficient", rank.deficient}};
    if (!eval.weighted_occupancy_positive) {
      out["warnings"] = json::array(
          {"some weighted occupancy is not positive: the variance-term projection can be "
           "singular; consider reward_baseline"});
    }
  } else {
    // Discounted moments only: the occupancy identities behind q, qtilde and
    // the analytic gradient hold for gamma = 1.
    const ValueSolution j = solve_j(work, policy);
    const ValueSolution m = solve_m(work, policy, j);
    const int start = work.nonterminal_index(work.initial_state());
    const double j0 = j.state[start];
    const double v0 = m.state[start] - j0 * j0;
    out["J0"] = j0;
    out["M0"] = m.state[start];
    out["V0"] = v0;
    out["eta"] = j0 - config.mu * v0;
    out["experimental"] = true;
    out["note"] = "gamma < 1: discounted moment recursions; occupancy-based quantities omitted";
  }
  return out;
}

}  // namespace vaac
