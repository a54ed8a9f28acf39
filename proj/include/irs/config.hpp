#pragma once

// JSON experiment configuration. Every key is optional; keys override the
// preset named by "preset" (default "desk").
//
// {
//   "preset": "desk" | "full",
//   "scenario": {
//     "bands_ghz": [1.885, 2.345], "n_tx": 4, "users_per_band": 2 | [2, 3],
//     "n_elements": 16, "bs_irs_distance": 50, "bs_user_distance": 50,
//     "irs_user_distance": 2, "pathloss_exponents": [2.5, 2.8, 3.5],
//     "reference_loss_db": 30, "noise_dbm": -80, "sinr_db": 5,
//     "placement": "disc" | "circle" | "fixed"
//   },
//   "baselines": ["ideal-model", "multi-band-selection", "certain-band", "random-irs", "no-irs"],
//   "sweep": {"variable": "sinr_db" | "elements", "values": [0, 2, 4, 6]},
//   "trials": 50, "seed": 1, "output": "results.csv", "threads": 0,
//   "certain_band": 0, "search_init": "largest-shortfall" | "serve-band" | "serve-none",
//   "repeat_search": false, "circuit_accurate": false,
//   "alternation": {"tolerance": 1e-4, "max_outer": 30}
// }

#include "irs/harness.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace irs::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig preset_by_name(const std::string& name);

/// Apply a parsed JSON document on top of `base`. Throws ConfigError.
void apply_config(ExperimentConfig& base, const nlohmann::json& doc);

ExperimentConfig load_config_file(const std::string& path);

channel::Placement placement_from_string(const std::string& name);
allocator::InitRule init_rule_from_string(const std::string& name);

}  // namespace irs::harness
