#pragma once

// End-to-end pipeline: per-band alternation between beamforming and phase
// design, per-element band assignment, final beamformer solve, and Monte
// Carlo sweeps over the baselines.

#include "irs/allocator.hpp"
#include "irs/channel.hpp"
#include "irs/phaseopt.hpp"
#include "irs/txbf.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irs::harness {

enum class Baseline { ideal_model, multi_band_selection, certain_band, random_irs, no_irs };

std::string_view to_string(Baseline b);
/// Accepts the CSV names ("ideal-model", "multi-band-selection", ...).
std::optional<Baseline> baseline_from_string(std::string_view name);
std::vector<Baseline> all_baselines();

enum class SweepVariable { sinr_db, elements };
std::string_view to_string(SweepVariable v);

struct Sweep {
  SweepVariable variable = SweepVariable::sinr_db;
  std::vector<double> values;
};

struct AlternationOptions {
  double tolerance = 1e-4;
  std::size_t max_outer = 30;
  phaseopt::PhaseOptions phase;
  txbf::SolverOptions solver;
};

struct ExperimentConfig {
  channel::Scenario scenario;
  std::vector<Baseline> baselines = all_baselines();
  Sweep sweep;
  std::size_t n_trials = 50;
  std::uint64_t seed = 1;
  std::string output_path;
  std::size_t certain_band = 0;
  allocator::InitRule search_init = allocator::InitRule::largest_shortfall;
  bool repeat_search = false;
  /// Fixed phases from the element circuit instead of e^{j0}.
  bool circuit_accurate = false;
  AlternationOptions alternation;
  std::size_t threads = 0;  ///< 0 = hardware concurrency

  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;
  /// Scenario at one sweep point.
  channel::Scenario scenario_at(double sweep_value) const;
};

/// M = 16, Nt = 4, S = 2, K_s = 2, 50 trials, SINR sweep {0, 2, 4, 6} dB.
ExperimentConfig desk_preset();
/// M = 64, Nt = 16, S = 3, K_s = 4, SINR sweep {0, 2, 4, 6, 8, 10} dB.
ExperimentConfig full_preset();

struct AlternationResult {
  RVec theta;
  CMat w;
  std::vector<double> trace;  ///< band power after each accepted outer iteration
  std::size_t outer_iterations = 0;
  bool feasible = false;
};

/// Alternate the beamformer solve (ideal reflection diag(e^{j theta})) and the
/// phase design until the band power changes by less than the tolerance.
/// A phase update that raises the re-solved power is rejected and ends the
/// loop, so the trace never increases.
AlternationResult run_single_band_alternation(std::size_t band, const channel::ChannelSet& channels,
                                              const channel::Scenario& scenario,
                                              const AlternationOptions& options, const RVec& theta0);

struct TrialResult {
  Baseline baseline = Baseline::no_irs;
  SweepVariable sweep_variable = SweepVariable::sinr_db;
  double sweep_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  double total_power_w = 0.0;
  std::vector<double> band_power_w;
  std::size_t outer_iterations = 0;
  double wall_ms = 0.0;
  std::vector<CMat> beamformers;
  /// Reflection diagonal per band; empty when the reflected path is excluded.
  std::vector<CVec> reflection;
  std::string indicator;  ///< compact status string, when an indicator applies

  double total_power_dbm() const;
};

/// Seed of trial `trial` under base seed `base` (same across sweep points).
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);
/// Initial phases of band `band` in a trial.
std::uint64_t phase_seed(std::uint64_t trial_seed, std::size_t band);

/// Run several baselines on one channel draw; the per-band alternation is
/// shared by the baselines that need it.
std::vector<TrialResult> run_trial(const ExperimentConfig& config, const std::vector<Baseline>& baselines,
                                   const channel::Scenario& scenario, std::uint64_t seed);

/// One baseline, one trial seed, at the config's base scenario.
TrialResult run_pipeline(const ExperimentConfig& config, Baseline baseline, std::uint64_t seed);

struct SummaryRow {
  Baseline baseline = Baseline::no_irs;
  double sweep_value = 0.0;
  std::size_t trials = 0;
  std::size_t feasible = 0;
  double mean_power_w = 0.0;  ///< NaN when no trial is feasible
  double mean_power_dbm = 0.0;
  double median_power_dbm = 0.0;
  double outage_rate = 0.0;
  double mean_wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;  ///< sorted by sweep point, baseline, trial
  std::vector<SummaryRow> summary;
  bool interrupted = false;

  bool all_infeasible() const;
  const SummaryRow* find(Baseline b, double sweep_value) const;
};

/// Run every sweep point x baseline x trial. Rows of each finished sweep point
/// are appended to `csv` (header first) and flushed, so an interrupted run
/// keeps what completed. `stop` is polled between trials.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* csv = nullptr,
                                const std::atomic<bool>* stop = nullptr);

/// baseline,sweep_variable,sweep_value,trial,seed,total_power_dbm,outage,outer_iterations,wall_ms
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const TrialResult& row);
void write_summary_csv(std::ostream& out, SweepVariable variable, const std::vector<SummaryRow>& rows);

/// Sum of ||w||^2 over the stored beamformers.
double audited_power(const TrialResult& row);
/// SINRs recomputed from the stored beamformers and reflection, [band][user].
std::vector<std::vector<double>> audited_sinrs(const TrialResult& row, const channel::ChannelSet& channels,
                                               const channel::Scenario& scenario);

}  // namespace irs::harness
