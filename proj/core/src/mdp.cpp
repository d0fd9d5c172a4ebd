#include "vaac/mdp.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <utility>

#include "vaac/errors.hpp"

namespace vaac {
namespace {

std::string shape_error(const std::string& what) { return "MdpModel: " + what; }

}  // namespace

MdpModel::MdpModel(std::vector<std::string> state_names, int initial_state, int terminal_state,
                   std::vector<std::string> action_names, Eigen::VectorXd rewards,
                   std::vector<Eigen::MatrixXd> transitions, double gamma)
    : state_names_(std::move(state_names)),
      action_names_(std::move(action_names)),
      initial_(initial_state),
      terminal_(terminal_state),
      rewards_(std::move(rewards)),
      transitions_(std::move(transitions)),
      gamma_(gamma) {
  const int n = num_states();
  if (n < 2) throw ContractError(shape_error("need at least an initial and a terminal state"));
  if (action_names_.empty()) throw ContractError(shape_error("need at least one action"));
  if (initial_ < 0 || initial_ >= n) throw ContractError(shape_error("initial state out of range"));
  if (terminal_ < 0 || terminal_ >= n)
    throw ContractError(shape_error("terminal state out of range"));
  if (initial_ == terminal_) throw ContractError(shape_error("initial state cannot be terminal"));
  if (rewards_.size() != n) throw ContractError(shape_error("rewards size != number of states"));
  if (static_cast<int>(transitions_.size()) != num_actions())
    throw ContractError(shape_error("one transition matrix per action required"));
  for (const auto& p : transitions_) {
    if (p.rows() != n || p.cols() != n)
      throw ContractError(shape_error("transition matrix must be |X| x |X|"));
  }
  if (!(gamma_ > 0.0 && gamma_ <= 1.0))
    throw ContractError(shape_error("gamma must lie in (0, 1]"));

  // The terminal row is never sampled; pin it to a self loop so linear-algebra
  // paths see a well-defined absorbing state.
  for (auto& p : transitions_) {
    p.row(terminal_).setZero();
    p(terminal_, terminal_) = 1.0;
  }

  nt_index_.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (x == terminal_) continue;
    nt_index_[x] = static_cast<int>(nonterminal_.size());
    nonterminal_.push_back(x);
  }
}

int MdpModel::state_index(const std::string& name) const {
  for (int x = 0; x < num_states(); ++x) {
    if (state_names_[x] == name) return x;
  }
  return -1;
}

int MdpModel::action_index(const std::string& name) const {
  for (int u = 0; u < num_actions(); ++u) {
    if (action_names_[u] == name) return u;
  }
  return -1;
}

namespace {

// Reachability along edges that carry positive probability under some action.
// Softmax policies put positive mass on every action, so this union graph is
// exactly what any policy in the library can traverse.
std::vector<bool> reachable_from(const MdpModel& model, int start) {
  std::vector<bool> seen(model.num_states(), false);
  std::queue<int> frontier;
  seen[start] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    if (model.is_terminal(x)) continue;
    for (int u = 0; u < model.num_actions(); ++u) {
      for (int y = 0; y < model.num_states(); ++y) {
        if (model.transition_prob(x, u, y) > 0.0 && !seen[y]) {
          seen[y] = true;
          frontier.push(y);
        }
      }
    }
  }
  return seen;
}

}  // namespace

ValidationReport validate_model(const MdpModel& model) {
  ValidationReport report;
  for (int x = 0; x < model.num_states(); ++x) {
    if (model.is_terminal(x)) continue;
    for (int u = 0; u < model.num_actions(); ++u) {
      double sum = 0.0;
      bool negative = false;
      for (int y = 0; y < model.num_states(); ++y) {
        const double p = model.transition_prob(x, u, y);
        if (p < 0.0) negative = true;
        sum += p;
      }
      std::ostringstream at;
      at << "(" << model.state_name(x) << ", " << model.action_name(u) << ")";
      if (negative) report.violations.push_back("negative transition probability at " + at.str());
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        report.violations.push_back("row not stochastic at " + at.str());
    }
  }

  if (model.reward(model.terminal_state()) != 0.0)
    report.violations.push_back("terminal state must carry zero reward");

  const auto from_initial = reachable_from(model, model.initial_state());
  for (int x : model.nonterminal_states()) {
    if (!from_initial[x])
      report.violations.push_back("state " + model.state_name(x) +
                                  " unreachable from the initial state");
  }
  for (int x : model.nonterminal_states()) {
    if (!reachable_from(model, x)[model.terminal_state()])
      report.violations.push_back("terminal state unreachable from state " +
                                  model.state_name(x));
  }
  return report;
}

}  // namespace vaac
