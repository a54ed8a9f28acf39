// irsopt: experiment CLI for multi-band IRS beamforming.
//
//   irsopt sweep-sinr      [--config f.json] [--preset desk|full] [-o out.csv] ...
//   irsopt sweep-elements  [--elements 8,16,32] [--sinr-db 5] ...
//   irsopt single-run      [--trial 0] [--channels-out ch.json] ...
//   irsopt circuit-sweep   [--bands-ghz 1.885,2.345,2.605] [-o sweep.csv]
//
// Exit codes: 0 success, 2 invalid config, 3 every trial infeasible.

#include "irs/circuit.hpp"
#include "irs/config.hpp"
#include "irs/harness.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace irs;
using harness::Baseline;
using harness::ConfigError;
using harness::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitAllInfeasible = 3;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

struct ScenarioFlags {
  std::string config_path;
  std::string preset;
  std::string output;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::size_t threads = 0;
  std::vector<std::string> baselines;
  std::vector<double> bands_ghz;
  std::size_t n_tx = 0;
  std::size_t users = 0;
  std::size_t elements = 0;
  double noise_dbm = 0.0;
  std::string placement;
  std::size_t certain_band = 0;
  std::string search_init;
  bool repeat_search = false;
  bool circuit_accurate = false;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file (overrides preset defaults)");
  app->add_option("--preset", f.preset, "desk | full");
  app->add_option("-o,--output", f.output, "CSV output path (stdout when omitted)");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--trials", f.trials, "trials per sweep point");
  app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  app->add_option("--baselines", f.baselines,
                  "comma list of ideal-model,multi-band-selection,certain-band,random-irs,no-irs")
      ->delimiter(',');
  app->add_option("--bands-ghz", f.bands_ghz, "carrier frequencies in GHz")->delimiter(',');
  app->add_option("--n-tx", f.n_tx, "antennas per BS");
  app->add_option("--users", f.users, "users per band");
  app->add_option("--noise-dbm", f.noise_dbm, "noise power per user (dBm)");
  app->add_option("--placement", f.placement, "disc | circle | fixed");
  app->add_option("--certain-band", f.certain_band, "band served by the certain-band baseline (0-based)");
  app->add_option("--search-init", f.search_init, "largest-shortfall | serve-band | serve-none");
  app->add_flag("--repeat-search", f.repeat_search, "repeat the element search until stable");
  app->add_flag("--circuit-accurate", f.circuit_accurate, "fixed phases from the element circuit");
}

bool given(const CLI::App* app, const char* name) { return app->count(name) > 0; }

ExperimentConfig build_config(const CLI::App* app, const ScenarioFlags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("cannot open config file '" + f.config_path + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
  }
  const std::string preset = given(app, "--preset") ? f.preset : doc.value("preset", std::string("desk"));
  ExperimentConfig c = harness::preset_by_name(preset);
  harness::apply_config(c, doc);

  nlohmann::json scen = nlohmann::json::object();
  if (given(app, "--bands-ghz")) scen["bands_ghz"] = f.bands_ghz;
  if (given(app, "--n-tx")) scen["n_tx"] = f.n_tx;
  if (given(app, "--users")) scen["users_per_band"] = f.users;
  if (given(app, "--noise-dbm")) scen["noise_dbm"] = f.noise_dbm;
  if (given(app, "--placement")) scen["placement"] = f.placement;
  nlohmann::json over = nlohmann::json::object();
  if (!scen.empty()) over["scenario"] = scen;
  if (given(app, "--baselines")) over["baselines"] = f.baselines;
  if (given(app, "--seed")) over["seed"] = f.seed;
  if (given(app, "--trials")) over["trials"] = f.trials;
  if (given(app, "--threads")) over["threads"] = f.threads;
  if (given(app, "--output")) over["output"] = f.output;
  if (given(app, "--certain-band")) over["certain_band"] = f.certain_band;
  if (given(app, "--search-init")) over["search_init"] = f.search_init;
  if (given(app, "--repeat-search")) over["repeat_search"] = f.repeat_search;
  if (given(app, "--circuit-accurate")) over["circuit_accurate"] = f.circuit_accurate;
  harness::apply_config(c, over);
  return c;
}

void print_summary(std::ostream& out, const harness::ExperimentResult& r) {
  out << std::left << std::setw(22) << "baseline" << std::setw(10) << "sweep" << std::setw(14) << "mean_dBm"
      << std::setw(14) << "median_dBm" << std::setw(10) << "outage" << "mean_ms\n";
  for (const auto& s : r.summary) {
    out << std::left << std::setw(22) << harness::to_string(s.baseline) << std::setw(10) << s.sweep_value
        << std::setw(14) << s.mean_power_dbm << std::setw(14) << s.median_power_dbm << std::setw(10)
        << s.outage_rate << s.mean_wall_ms << '\n';
  }
}

int run_sweep(ExperimentConfig config) {
  config.validate();
  std::signal(SIGINT, on_interrupt);
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!config.output_path.empty()) {
    file.open(config.output_path);
    if (!file) throw ConfigError("cannot write '" + config.output_path + "'");
    csv = &file;
  }
  const auto result = harness::run_experiment(config, csv, &g_stop);
  std::ostream& report = config.output_path.empty() ? std::cerr : std::cout;
  print_summary(report, result);
  if (!config.output_path.empty()) {
    std::filesystem::path p(config.output_path);
    const auto summary_path = p.parent_path() / (p.stem().string() + "_summary.csv");
    std::ofstream summary(summary_path);
    harness::write_summary_csv(summary, config.sweep.variable, result.summary);
  }
  if (result.interrupted) report << "interrupted: partial results written\n";
  return result.all_infeasible() ? kExitAllInfeasible : kExitOk;
}

int run_single(ExperimentConfig config, std::size_t trial, const std::string& channels_out) {
  config.validate();
  const std::uint64_t seed = harness::trial_seed(config.seed, trial);
  const auto rows = harness::run_trial(config, config.baselines, config.scenario, seed);
  if (!channels_out.empty()) {
    channel::Scenario s = config.scenario;
    s.rng_seed = seed;
    std::ofstream out(channels_out);
    channel::write_channel_set(out, channel::generate(s));
  }
  std::cout << std::left << std::setw(22) << "baseline" << std::setw(10) << "feasible" << std::setw(14)
            << "power_dBm" << std::setw(8) << "outer" << "indicator\n";
  bool any = false;
  for (const auto& r : rows) {
    any = any || r.feasible;
    std::cout << std::left << std::setw(22) << harness::to_string(r.baseline) << std::setw(10)
              << (r.feasible ? "yes" : "no") << std::setw(14) << r.total_power_dbm() << std::setw(8)
              << r.outer_iterations << r.indicator << '\n';
  }
  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path);
    harness::write_csv_header(out);
    for (auto r : rows) {
      r.sweep_variable = harness::SweepVariable::sinr_db;
      r.sweep_value = 10.0 * std::log10(config.scenario.sinr_targets[0][0]);
      r.trial = trial;
      harness::write_csv_row(out, r);
    }
  }
  return any ? kExitOk : kExitAllInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint beamforming, IRS phase and band-assignment experiments"};
  app.require_subcommand(1);

  ScenarioFlags sinr_flags;
  std::vector<double> sinr_values;
  std::size_t sinr_elements = 0;
  auto* sweep_sinr = app.add_subcommand("sweep-sinr", "total power versus SINR target");
  add_scenario_flags(sweep_sinr, sinr_flags);
  sweep_sinr->add_option("--sinr-db", sinr_values, "SINR targets (dB)")->delimiter(',');
  sweep_sinr->add_option("--elements", sinr_elements, "IRS elements M");

  ScenarioFlags elem_flags;
  std::vector<double> elem_values;
  double elem_sinr = 5.0;
  auto* sweep_elem = app.add_subcommand("sweep-elements", "total power versus element count");
  add_scenario_flags(sweep_elem, elem_flags);
  sweep_elem->add_option("--elements", elem_values, "element counts")->delimiter(',');
  sweep_elem->add_option("--sinr-db", elem_sinr, "SINR target (dB)");

  ScenarioFlags single_flags;
  double single_sinr = 5.0;
  std::size_t single_elements = 0;
  std::size_t single_trial = 0;
  std::string channels_out;
  auto* single = app.add_subcommand("single-run", "one trial of the selected baselines");
  add_scenario_flags(single, single_flags);
  single->add_option("--sinr-db", single_sinr, "SINR target (dB)");
  single->add_option("--elements", single_elements, "IRS elements M");
  single->add_option("--trial", single_trial, "trial index (selects the derived seed)");
  single->add_option("--channels-out", channels_out, "write the channel realization as JSON");

  std::vector<double> circ_bands{1.885, 2.345, 2.605};
  std::size_t circ_samples = circuit::kDefaultSweepSamples;
  double c_min_pf = 0.2;
  double c_max_pf = 3.0;
  double tunable_deg = circuit::kDefaultTunableThresholdDeg;
  double fixed_deg = circuit::kDefaultFixedThresholdDeg;
  std::string circ_out;
  auto* circ = app.add_subcommand("circuit-sweep", "phase/amplitude versus capacitance and status table");
  circ->add_option("--bands-ghz", circ_bands, "carrier frequencies in GHz")->delimiter(',');
  circ->add_option("--samples", circ_samples, "capacitance samples");
  circ->add_option("--c-min-pf", c_min_pf, "lowest capacitance (pF)");
  circ->add_option("--c-max-pf", c_max_pf, "highest capacitance (pF)");
  circ->add_option("--tunable-deg", tunable_deg, "tunable span threshold (degrees)");
  circ->add_option("--fixed-deg", fixed_deg, "fixed span threshold (degrees)");
  circ->add_option("-o,--output", circ_out, "sweep CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  try {
    if (*sweep_sinr) {
      auto c = build_config(sweep_sinr, sinr_flags);
      c.sweep.variable = harness::SweepVariable::sinr_db;
      if (!sinr_values.empty()) {
        c.sweep.values = sinr_values;
      } else if (c.sweep.values.empty()) {
        c.sweep.values = {0.0, 2.0, 4.0, 6.0};
      }
      if (sinr_elements > 0) c.scenario.n_elements = sinr_elements;
      return run_sweep(std::move(c));
    }
    if (*sweep_elem) {
      auto c = build_config(sweep_elem, elem_flags);
      const bool from_config = c.sweep.variable == harness::SweepVariable::elements;
      c.sweep.variable = harness::SweepVariable::elements;
      if (!elem_values.empty()) {
        c.sweep.values = elem_values;
      } else if (!from_config) {
        c.sweep.values = {8.0, 16.0, 32.0};
      }
      if (sweep_elem->count("--sinr-db") > 0 || !from_config) c.scenario.set_sinr_db(elem_sinr);
      return run_sweep(std::move(c));
    }
    if (*single) {
      auto c = build_config(single, single_flags);
      if (single->count("--sinr-db") > 0) c.scenario.set_sinr_db(single_sinr);
      if (single_elements > 0) c.scenario.n_elements = single_elements;
      if (c.sweep.values.empty()) c.sweep.values = {0.0};
      return run_single(std::move(c), single_trial, channels_out);
    }
    if (*circ) {
      auto element = circuit::ElementCircuit::smv1231();
      element.c_min = c_min_pf * 1e-12;
      element.c_max = c_max_pf * 1e-12;
      std::vector<double> bands;
      for (double g : circ_bands) bands.push_back(g * 1e9);
      element.validate();
      const auto table = circuit::derive_status_table(element, bands, tunable_deg, fixed_deg, circ_samples);
      std::ofstream file;
      if (!circ_out.empty()) {
        file.open(circ_out);
        if (!file) throw ConfigError("cannot write '" + circ_out + "'");
      }
      circuit::write_reflection_sweep_csv(circ_out.empty() ? std::cout : file, element, bands, circ_samples);
      std::ostream& report = circ_out.empty() ? std::cerr : std::cout;
      report << "status, interval_pf, spans_deg\n";
      for (const auto& st : table.statuses) {
        report << (st.tunable_band ? "C_" + std::to_string(*st.tunable_band + 1) : std::string("C_no")) << ", ["
               << st.interval.lo * 1e12 << ", " << st.interval.hi * 1e12 << "],";
        for (double sp : st.span_deg) report << ' ' << sp;
        report << '\n';
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return kExitOk;
}
