#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vaac {

inline constexpr double kRowSumTolerance = 1e-9;

// Finite episodic MDP with one absorbing terminal state and state-based
// rewards. Transitions are stored per action as |X| x |X| row-stochastic
// matrices; the terminal row is normalized to a self loop on construction.
class MdpModel {
 public:
  MdpModel(std::vector<std::string> state_names, int initial_state, int terminal_state,
           std::vector<std::string> action_names, Eigen::VectorXd rewards,
           std::vector<Eigen::MatrixXd> transitions, double gamma = 1.0);

  int num_states() const { return static_cast<int>(state_names_.size()); }
  int num_actions() const { return static_cast<int>(action_names_.size()); }
  int num_nonterminal() const { return static_cast<int>(nonterminal_.size()); }
  int initial_state() const { return initial_; }
  int terminal_state() const { return terminal_; }
  bool is_terminal(int state) const { return state == terminal_; }

  // Nonterminal state ids in model order; value/occupancy vectors follow it.
  const std::vector<int>& nonterminal_states() const { return nonterminal_; }
  // Position of state in nonterminal_states(), -1 for the terminal state.
  int nonterminal_index(int state) const { return nt_index_[state]; }

  double reward(int state) const { return rewards_[state]; }
  const Eigen::VectorXd& rewards() const { return rewards_; }
  double gamma() const { return gamma_; }

  const Eigen::MatrixXd& transitions(int action) const { return transitions_[action]; }
  double transition_prob(int from, int action, int to) const {
    return transitions_[action](from, to);
  }

  const std::string& state_name(int state) const { return state_names_[state]; }
  const std::string& action_name(int action) const { return action_names_[action]; }
  int state_index(const std::string& name) const;   // -1 when absent
  int action_index(const std::string& name) const;  // -1 when absent

 private:
  std::vector<std::string> state_names_;
  std::vector<std::string> action_names_;
  int initial_ = 0;
  int terminal_ = 0;
  Eigen::VectorXd rewards_;
  std::vector<Eigen::MatrixXd> transitions_;
  double gamma_ = 1.0;
  std::vector<int> nonterminal_;
  std::vector<int> nt_index_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Full model check: rows stochastic within kRowSumTolerance, terminal reward
// zero, every nonterminal state reachable from the initial state and the
// terminal state reachable from every state along positive-probability edges.
ValidationReport validate_model(const MdpModel& model);

}  // namespace vaac
