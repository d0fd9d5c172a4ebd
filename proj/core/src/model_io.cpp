#include "vaac/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "vaac/errors.hpp"

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
    if (!known) throw IoError("model: unknown key \"" + it.key() + "\" in " + where);
  }
}

std::vector<std::string> name_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty())
    throw IoError(std::string("model: \"") + key + "\" must be a nonempty array of names");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& entry : doc[key]) {
    if (!entry.is_string())
      throw IoError(std::string("model: \"") + key + "\" entries must be strings");
    const std::string name = entry.get<std::string>();
    if (!seen.insert(name).second)
      throw IoError("model: duplicate name \"" + name + "\" in \"" + key + "\"");
    names.push_back(name);
  }
  return names;
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) throw IoError("model: " + where + " must be a number");
  return value.get<double>();
}

}  // namespace

MdpModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw IoError("model: document must be a JSON object");
  check_keys(doc, {"states", "initial", "terminal", "actions", "rewards", "transitions", "gamma"},
             "the model document");

  const std::vector<std::string> states = name_list(doc, "states");
  const std::vector<std::string> actions = name_list(doc, "actions");
  const auto state_of = [&](const std::string& name, const std::string& where) {
    for (int x = 0; x < static_cast<int>(states.size()); ++x) {
      if (states[x] == name) return x;
    }
    throw IoError("model: unknown state \"" + name + "\" in " + where);
  };
  const auto action_of = [&](const std::string& name, const std::string& where) {
    for (int u = 0; u < static_cast<int>(actions.size()); ++u) {
      if (actions[u] == name) return u;
    }
    throw IoError("model: unknown action \"" + name + "\" in " + where);
  };

  if (!doc.contains("initial") || !doc["initial"].is_string())
    throw IoError("model: \"initial\" must name a state");
  const int initial = state_of(doc["initial"].get<std::string>(), "\"initial\"");
  const int terminal = doc.contains("terminal")
                           ? (doc["terminal"].is_string()
                                  ? state_of(doc["terminal"].get<std::string>(), "\"terminal\"")
                                  : throw IoError("model: \"terminal\" must name a state"))
                           : static_cast<int>(states.size()) - 1;

  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(states.size());
  if (doc.contains("rewards")) {
    if (!doc["rewards"].is_object())
      throw IoError("model: \"rewards\" must map state names to numbers");
    for (auto it = doc["rewards"].begin(); it != doc["rewards"].end(); ++it) {
      rewards[state_of(it.key(), "\"rewards\"")] =
          number_at(it.value(), "reward of \"" + it.key() + "\"");
    }
  }

  std::vector<Eigen::MatrixXd> transitions(
      actions.size(), Eigen::MatrixXd::Zero(states.size(), states.size()));
  if (!doc.contains("transitions") || !doc["transitions"].is_array())
    throw IoError("model: \"transitions\" must be an array of entries");
  std::set<std::pair<int, std::pair<int, int>>> seen;
  for (const auto& entry : doc["transitions"]) {
    if (!entry.is_object()) throw IoError("model: transition entries must be objects");
    check_keys(entry, {"from", "action", "to", "prob"}, "a transition entry");
    for (const char* key : {"from", "action", "to"}) {
      if (!entry.contains(key) || !entry[key].is_string())
        throw IoError(std::string("model: transition entry needs string \"") + key + "\"");
    }
    const int from = state_of(entry["from"].get<std::string>(), "a transition entry");
    const int action = action_of(entry["action"].get<std::string>(), "a transition entry");
    const int to = state_of(entry["to"].get<std::string>(), "a transition entry");
    if (!entry.contains("prob")) throw IoError("model: transition entry needs \"prob\"");
    const double prob = number_at(entry["prob"], "a transition probability");
    if (prob < 0.0) throw IoError("model: negative transition probability");
    if (from == terminal)
      throw IoError("model: the terminal state cannot have outgoing transitions");
    if (!seen.insert({from, {action, to}}).second) {
      std::ostringstream msg;
      msg << "model: duplicate transition entry (" << states[from] << ", " << actions[action]
          << ", " << states[to] << ")";
      throw IoError(msg.str());
    }
    transitions[action](from, to) = prob;
  }

  const double gamma =
      doc.contains("gamma") ? number_at(doc["gamma"], "\"gamma\"") : 1.0;

  try {
    MdpModel model(states, initial, terminal, actions, std::move(rewards),
                   std::move(transitions), gamma);
    const ValidationReport report = validate_model(model);
    if (!report.ok()) {
      std::ostringstream msg;
      msg << "model: validation failed:";
      for (const auto& violation : report.violations) msg << "\n  - " << violation;
      throw IoError(msg.str());
    }
    return model;
  } catch (const ContractError& error) {
    throw IoError(std::string("model: ") + error.what());
  }
}

MdpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("model: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& error) {
    throw IoError("model: cannot parse " + path + ": " + error.what());
  }
  return model_from_json(doc);
}

json model_to_json(const MdpModel& model) {
  json doc;
  doc["states"] = json::array();
  for (int x = 0; x < model.num_states(); ++x) doc["states"].push_back(model.state_name(x));
  doc["initial"] = model.state_name(model.initial_state());
  doc["terminal"] = model.state_name(model.terminal_state());
  doc["actions"] = json::array();
  for (int u = 0; u < model.num_actions(); ++u) doc["actions"].push_back(model.action_name(u));
  doc["rewards"] = json::object();
  for (int x = 0; x < model.num_states(); ++x) doc["rewards"][model.state_name(x)] = model.reward(x);
  doc["transitions"] = json::array();
  for (int x : model.nonterminal_states()) {
    for (int u = 0; u < model.num_actions(); ++u) {
      for (int y = 0; y < model.num_states(); ++y) {
        const double prob = model.transition_prob(x, u, y);
        if (prob > 0.0) {
          doc["transitions"].push_back({{"from", model.state_name(x)},
                                        {"action", model.action_name(u)},
                                        {"to", model.state_name(y)},
                                        {"prob", prob}});
        }
      }
    }
  }
  doc["gamma"] = model.gamma();
  return doc;
}

}  // namespace vaac
