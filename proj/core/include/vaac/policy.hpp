#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vaac/mdp.hpp"

namespace vaac {

// Tabular softmax policy over nonterminal states. One action per state is the
// reference whose logit is pinned to zero, so a model with |U| actions has
// |X_nt| * (|U| - 1) free parameters and the parameterization is identifiable.
// Parameters are blocked by state in nonterminal_states() order; inside a
// block, actions keep model order with the reference action skipped.
class SoftmaxPolicy {
 public:
  // Empty theta means zeros (the uniform policy); empty reference_actions
  // means action 0 for every nonterminal state.
  explicit SoftmaxPolicy(const MdpModel& model, Eigen::VectorXd theta = Eigen::VectorXd(),
                         std::vector<int> reference_actions = {});

  int param_count() const { return static_cast<int>(theta_.size()); }
  int num_actions() const { return num_actions_; }
  int reference_action(int state) const;
  // Index of the theta component steering pi(action|state); -1 for the
  // reference action. Terminal state is a contract error.
  int param_index(int state, int action) const;

  const Eigen::VectorXd& theta() const { return theta_; }
  void set_theta(const Eigen::VectorXd& theta);
  SoftmaxPolicy with_theta(const Eigen::VectorXd& theta) const;

  // pi(.|state); strictly positive for moderate logits (log-sum-exp form).
  Eigen::VectorXd action_distribution(int state) const;
  // Gradient of log pi(action|state) in theta, dense over all parameters:
  // component (x,u') is 1{x=state} (1{u'=action} - pi(u'|state)).
  Eigen::VectorXd score(int state, int action) const;

  bool is_terminal(int state) const { return state == terminal_; }
  const std::vector<int>& nonterminal_states() const { return nonterminal_; }
  int nonterminal_index(int state) const { return nt_index_[state]; }

 private:
  void check_nonterminal(int state, const char* op) const;

  int num_states_ = 0;
  int num_actions_ = 0;
  int terminal_ = -1;
  std::vector<int> nonterminal_;
  std::vector<int> nt_index_;
  std::vector<int> reference_;  // per nonterminal position
  Eigen::VectorXd theta_;
};

}  // namespace vaac
