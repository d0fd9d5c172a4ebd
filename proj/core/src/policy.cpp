#include "vaac/policy.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "vaac/errors.hpp"

namespace vaac {

SoftmaxPolicy::SoftmaxPolicy(const MdpModel& model, Eigen::VectorXd theta,
                             std::vector<int> reference_actions)
    : num_states_(model.num_states()),
      num_actions_(model.num_actions()),
      terminal_(model.terminal_state()),
      nonterminal_(model.nonterminal_states()),
      nt_index_(num_states_, -1) {
  for (int x : nonterminal_) nt_index_[x] = model.nonterminal_index(x);

  if (reference_actions.empty()) {
    reference_.assign(nonterminal_.size(), 0);
  } else {
    if (reference_actions.size() != nonterminal_.size())
      throw ContractError("SoftmaxPolicy: one reference action per nonterminal state required");
    for (int u : reference_actions) {
      if (u < 0 || u >= num_actions_)
        throw ContractError("SoftmaxPolicy: reference action out of range");
    }
    reference_ = std::move(reference_actions);
  }

  const int n = static_cast<int>(nonterminal_.size()) * (num_actions_ - 1);
  if (theta.size() == 0) theta = Eigen::VectorXd::Zero(n);
  if (theta.size() != n) {
    std::ostringstream msg;
    msg << "SoftmaxPolicy: theta has " << theta.size() << " entries, expected " << n;
    throw ContractError(msg.str());
  }
  theta_ = std::move(theta);
}

int SoftmaxPolicy::reference_action(int state) const {
  check_nonterminal(state, "reference_action");
  return reference_[nt_index_[state]];
}

int SoftmaxPolicy::param_index(int state, int action) const {
  check_nonterminal(state, "param_index");
  if (action < 0 || action >= num_actions_)
    throw ContractError("SoftmaxPolicy: action out of range");
  const int pos = nt_index_[state];
  const int ref = reference_[pos];
  if (action == ref) return -1;
  // Inside a state block actions keep model order with the reference skipped.
  const int offset = action - (action > ref ? 1 : 0);
  return pos * (num_actions_ - 1) + offset;
}

void SoftmaxPolicy::set_theta(const Eigen::VectorXd& theta) {
  if (theta.size() != theta_.size())
    throw ContractError("SoftmaxPolicy: theta size changed in set_theta");
  theta_ = theta;
}

SoftmaxPolicy SoftmaxPolicy::with_theta(const Eigen::VectorXd& theta) const {
  SoftmaxPolicy copy(*this);
  copy.set_theta(theta);
  return copy;
}

Eigen::VectorXd SoftmaxPolicy::action_distribution(int state) const {
  check_nonterminal(state, "action_distribution");
  Eigen::VectorXd logits(num_actions_);
  for (int u = 0; u < num_actions_; ++u) {
    const int j = param_index(state, u);
    logits[u] = j < 0 ? 0.0 : theta_[j];
  }
  // Max-shifted softmax: exp never overflows and the result stays positive.
  const double top = logits.maxCoeff();
  Eigen::VectorXd probs = (logits.array() - top).exp();
  probs /= probs.sum();
  return probs;
}

Eigen::VectorXd SoftmaxPolicy::score(int state, int action) const {
  check_nonterminal(state, "score");
  if (action < 0 || action >= num_actions_)
    throw ContractError("SoftmaxPolicy: action out of range");
  const Eigen::VectorXd probs = action_distribution(state);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  for (int u = 0; u < num_actions_; ++u) {
    const int j = param_index(state, u);
    if (j < 0) continue;
    grad[j] = (u == action ? 1.0 : 0.0) - probs[u];
  }
  return grad;
}

void SoftmaxPolicy::check_nonterminal(int state, const char* op) const {
  if (state < 0 || state >= num_states_)
    throw ContractError(std::string("SoftmaxPolicy: state out of range in ") + op);
  if (state == terminal_)
    throw ContractError(std::string("SoftmaxPolicy: terminal state passed to ") + op);
}

}  // namespace vaac
