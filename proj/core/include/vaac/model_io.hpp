#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "vaac/mdp.hpp"

namespace vaac {

// JSON model schema:
//   {
//     "states": ["s1", ...],          // >= 2 unique names
//     "initial": "s1",
//     "terminal": "end",              // optional; default: last listed state
//     "actions": ["a", ...],
//     "rewards": {"s1": 1.0, ...},    // by state name; missing names mean 0
//     "transitions": [{"from": "s1", "action": "a", "to": "s2", "prob": 1.0}, ...],
//     "gamma": 1.0                    // optional; default 1
//   }
// Unknown keys are rejected. Rows must sum to 1 within 1e-9, the terminal
// reward must be 0, and the loaded model must pass validate_model.
MdpModel model_from_json(const nlohmann::json& doc);
MdpModel load_model(const std::string& path);
nlohmann::json model_to_json(const MdpModel& model);

}  // namespace vaac
