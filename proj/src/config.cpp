#include "irs/config.hpp"

#include <fstream>

namespace irs::harness {
namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void apply_scenario(channel::Scenario& s, const json& j) {
  if (!j.is_object()) throw ConfigError("'scenario' must be an object");
  if (j.contains("bands_ghz")) {
    const auto ghz = get_as<std::vector<double>>(j, "bands_ghz");
    if (ghz.empty()) throw ConfigError("'bands_ghz' must not be empty");
    const double gamma = s.sinr_targets.empty() || s.sinr_targets[0].empty() ? 1.0 : s.sinr_targets[0][0];
    const double noise = s.noise_power.empty() || s.noise_power[0].empty() ? 1e-11 : s.noise_power[0][0];
    const std::size_t k = s.users_per_band.empty() ? 1 : s.users_per_band[0];
    s.band_frequencies.clear();
    for (double g : ghz) s.band_frequencies.push_back(g * 1e9);
    s.users_per_band.assign(ghz.size(), k);
    s.sinr_targets.assign(ghz.size(), std::vector<double>(k, gamma));
    s.noise_power.assign(ghz.size(), std::vector<double>(k, noise));
  }
  if (j.contains("n_tx")) s.n_tx = get_as<std::size_t>(j, "n_tx");
  if (j.contains("n_elements")) s.n_elements = get_as<std::size_t>(j, "n_elements");
  if (j.contains("users_per_band")) {
    const auto& u = j.at("users_per_band");
    if (u.is_array()) {
      s.set_users_per_band(get_as<std::vector<std::size_t>>(j, "users_per_band"));
    } else {
      s.set_users_per_band(std::vector<std::size_t>(s.n_bands(), get_as<std::size_t>(j, "users_per_band")));
    }
  }
  if (j.contains("bs_irs_distance")) s.bs_irs_distance = get_as<double>(j, "bs_irs_distance");
  if (j.contains("bs_user_distance")) s.bs_user_distance = get_as<double>(j, "bs_user_distance");
  if (j.contains("irs_user_distance")) s.irs_user_distance = get_as<double>(j, "irs_user_distance");
  if (j.contains("pathloss_exponents")) {
    const auto e = get_as<std::vector<double>>(j, "pathloss_exponents");
    if (e.size() != 3) throw ConfigError("'pathloss_exponents' needs [bs_irs, irs_user, bs_user]");
    s.exponents = {e[0], e[1], e[2]};
  }
  if (j.contains("reference_loss_db")) s.reference_loss_db = get_as<double>(j, "reference_loss_db");
  if (j.contains("noise_dbm")) s.set_noise_dbm(get_as<double>(j, "noise_dbm"));
  if (j.contains("sinr_db")) s.set_sinr_db(get_as<double>(j, "sinr_db"));
  if (j.contains("placement")) s.placement = placement_from_string(get_as<std::string>(j, "placement"));
}

}  // namespace

channel::Placement placement_from_string(const std::string& name) {
  if (name == "disc") return channel::Placement::disc;
  if (name == "circle") return channel::Placement::circle;
  if (name == "fixed") return channel::Placement::fixed;
  throw ConfigError("unknown placement '" + name + "'");
}

allocator::InitRule init_rule_from_string(const std::string& name) {
  if (name == "largest-shortfall") return allocator::InitRule::largest_shortfall;
  if (name == "serve-band") return allocator::InitRule::serve_band;
  if (name == "serve-none") return allocator::InitRule::serve_none;
  throw ConfigError("unknown search_init '" + name + "'");
}

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "full") return full_preset();
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_config(ExperimentConfig& c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  if (doc.contains("scenario")) apply_scenario(c.scenario, doc.at("scenario"));
  if (doc.contains("baselines")) {
    c.baselines.clear();
    for (const auto& name : get_as<std::vector<std::string>>(doc, "baselines")) {
      const auto b = baseline_from_string(name);
      if (!b) throw ConfigError("unknown baseline '" + name + "'");
      c.baselines.push_back(*b);
    }
  }
  if (doc.contains("sweep")) {
    const auto& sw = doc.at("sweep");
    if (sw.contains("variable")) {
      const auto v = get_as<std::string>(sw, "variable");
      if (v == "sinr_db") {
        c.sweep.variable = SweepVariable::sinr_db;
      } else if (v == "elements") {
        c.sweep.variable = SweepVariable::elements;
      } else {
        throw ConfigError("unknown sweep variable '" + v + "'");
      }
    }
    if (sw.contains("values")) c.sweep.values = get_as<std::vector<double>>(sw, "values");
  }
  if (doc.contains("trials")) c.n_trials = get_as<std::size_t>(doc, "trials");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("output")) c.output_path = get_as<std::string>(doc, "output");
  if (doc.contains("threads")) c.threads = get_as<std::size_t>(doc, "threads");
  if (doc.contains("certain_band")) c.certain_band = get_as<std::size_t>(doc, "certain_band");
  if (doc.contains("search_init")) c.search_init = init_rule_from_string(get_as<std::string>(doc, "search_init"));
  if (doc.contains("repeat_search")) c.repeat_search = get_as<bool>(doc, "repeat_search");
  if (doc.contains("circuit_accurate")) c.circuit_accurate = get_as<bool>(doc, "circuit_accurate");
  if (doc.contains("alternation")) {
    const auto& a = doc.at("alternation");
    if (a.contains("tolerance")) c.alternation.tolerance = get_as<double>(a, "tolerance");
    if (a.contains("max_outer")) c.alternation.max_outer = get_as<std::size_t>(a, "max_outer");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  ExperimentConfig c = preset_by_name(doc.value("preset", std::string("desk")));
  apply_config(c, doc);
  return c;
}

}  // namespace irs::harness
