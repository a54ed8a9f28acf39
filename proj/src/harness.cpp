#include "irs/harness.hpp"

#include "irs/circuit.hpp"
#include "irs/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace irs::harness {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

CVec ideal_diag(const RVec& theta) {
  CVec d(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) d(m) = std::polar(1.0, theta(m));
  return d;
}

std::string format_number(double v, const char* fmt) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Fill power fields of a trial from per-band solves.
void record_solves(TrialResult& row, const std::vector<txbf::SolveResult>& solves,
                   std::vector<CVec> reflection) {
  row.feasible = true;
  row.total_power_w = 0.0;
  for (const auto& s : solves) {
    if (!s.usable()) {
      row.feasible = false;
      row.band_power_w.push_back(std::numeric_limits<double>::quiet_NaN());
      row.beamformers.emplace_back();
      continue;
    }
    row.band_power_w.push_back(s.beamformer.power);
    row.beamformers.push_back(s.beamformer.w);
    row.total_power_w += s.beamformer.power;
  }
  if (!row.feasible) row.total_power_w = std::numeric_limits<double>::quiet_NaN();
  row.reflection = std::move(reflection);
}

}  // namespace

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::ideal_model:
      return "ideal-model";
    case Baseline::multi_band_selection:
      return "multi-band-selection";
    case Baseline::certain_band:
      return "certain-band";
    case Baseline::random_irs:
      return "random-irs";
    case Baseline::no_irs:
      return "no-irs";
  }
  return "unknown";
}

std::optional<Baseline> baseline_from_string(std::string_view name) {
  for (Baseline b : all_baselines()) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

std::vector<Baseline> all_baselines() {
  return {Baseline::ideal_model, Baseline::multi_band_selection, Baseline::certain_band, Baseline::random_irs,
          Baseline::no_irs};
}

std::string_view to_string(SweepVariable v) {
  return v == SweepVariable::sinr_db ? "sinr_db" : "elements";
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (n_trials == 0) throw std::invalid_argument("n_trials must be at least 1");
  if (sweep.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (baselines.empty()) throw std::invalid_argument("at least one baseline is required");
  if (certain_band >= scenario.n_bands()) throw std::invalid_argument("certain_band out of range");
  if (sweep.variable == SweepVariable::elements) {
    for (double v : sweep.values) {
      if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument("element counts must be positive integers");
    }
  }
  if (!(alternation.tolerance > 0.0) || alternation.max_outer == 0) {
    throw std::invalid_argument("alternation needs tolerance > 0 and max_outer >= 1");
  }
}

channel::Scenario ExperimentConfig::scenario_at(double sweep_value) const {
  channel::Scenario s = scenario;
  if (sweep.variable == SweepVariable::sinr_db) {
    s.set_sinr_db(sweep_value);
  } else {
    s.n_elements = static_cast<std::size_t>(sweep_value);
  }
  return s;
}

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.scenario = channel::Scenario::uniform({1.885e9, 2.345e9}, 4, 2, 16, 5.0, -80.0, 1);
  c.sweep = {SweepVariable::sinr_db, {0.0, 2.0, 4.0, 6.0}};
  c.n_trials = 50;
  return c;
}

ExperimentConfig full_preset() {
  ExperimentConfig c;
  c.scenario = channel::Scenario::uniform({1.885e9, 2.345e9, 2.605e9}, 16, 4, 64, 5.0, -80.0, 1);
  c.sweep = {SweepVariable::sinr_db, {0.0, 2.0, 4.0, 6.0, 8.0, 10.0}};
  c.n_trials = 50;
  return c;
}

AlternationResult run_single_band_alternation(std::size_t band, const channel::ChannelSet& channels,
                                              const channel::Scenario& scenario,
                                              const AlternationOptions& options, const RVec& theta0) {
  if (band >= scenario.n_bands() || band >= channels.bands.size()) {
    throw std::invalid_argument("alternation: band out of range");
  }
  const auto& ch = channels.bands[band];
  if (theta0.size() != ch.g.rows()) throw std::invalid_argument("alternation: initial phases length != M");
  const auto& targets = scenario.sinr_targets[band];
  const auto& noise = scenario.noise_power[band];

  AlternationResult res;
  res.theta = theta0;
  auto solve = [&](const RVec& theta) {
    return txbf::solve_power_min(channel::effective_channels(ch, ideal_diag(theta)), targets, noise,
                                 options.solver);
  };

  auto first = solve(res.theta);
  if (!first.usable()) return res;
  res.feasible = true;
  res.w = first.beamformer.w;
  double power = first.beamformer.power;
  res.trace.push_back(power);

  CVec v = phaseopt::phases_to_vector(res.theta);
  while (res.outer_iterations < options.max_outer) {
    ++res.outer_iterations;
    const auto obj = phaseopt::build_objective(ch.h_r, ch.g, ch.h_d, res.w, targets, noise);
    const auto designed = phaseopt::optimize_phases(obj, v, options.phase);
    const RVec theta = phaseopt::vector_to_phases(designed.v);
    auto next = solve(theta);
    if (!next.usable() || next.beamformer.power > power) break;
    const double previous = power;
    power = next.beamformer.power;
    v = designed.v;
    res.theta = theta;
    res.w = std::move(next.beamformer.w);
    res.trace.push_back(power);
    if (previous - power <= options.tolerance * previous) break;
  }
  return res;
}

double TrialResult::total_power_dbm() const {
  return feasible ? watts_to_dbm(total_power_w) : std::numeric_limits<double>::quiet_NaN();
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) { return derive_seed(base, trial); }

std::uint64_t phase_seed(std::uint64_t trial_seed, std::size_t band) {
  return derive_seed(trial_seed, 0x1000 + band);
}

std::vector<TrialResult> run_trial(const ExperimentConfig& config, const std::vector<Baseline>& baselines,
                                   const channel::Scenario& scenario_in, std::uint64_t seed) {
  channel::Scenario scenario = scenario_in;
  scenario.rng_seed = seed;
  const channel::ChannelSet channels = channel::generate(scenario);
  const std::size_t n_bands = scenario.n_bands();
  const std::size_t m = scenario.n_elements;

  allocator::FixedPhaseTable fixed;
  if (config.circuit_accurate) {
    const auto element = circuit::ElementCircuit::smv1231();
    fixed = allocator::FixedPhaseTable::from_circuit(
        element, circuit::derive_status_table(element, scenario.band_frequencies));
  }

  // Lazily computed per-band alternation, shared across baselines.
  std::vector<std::optional<AlternationResult>> alt(n_bands);
  std::vector<double> alt_ms(n_bands, 0.0);
  auto alternation = [&](std::size_t s) -> const AlternationResult& {
    if (!alt[s]) {
      const auto start = Clock::now();
      alt[s] = run_single_band_alternation(s, channels, scenario, config.alternation,
                                           phaseopt::random_phases(m, phase_seed(seed, s)));
      alt_ms[s] = elapsed_ms(start);
    }
    return *alt[s];
  };

  std::vector<TrialResult> out;
  for (Baseline baseline : baselines) {
    TrialResult row;
    row.baseline = baseline;
    row.seed = seed;
    row.sweep_variable = config.sweep.variable;
    const auto start = Clock::now();
    double shared_ms = 0.0;

    switch (baseline) {
      case Baseline::no_irs: {
        std::vector<txbf::SolveResult> solves;
        for (std::size_t s = 0; s < n_bands; ++s) {
          solves.push_back(txbf::solve_power_min(channel::effective_channels(channels.bands[s], CVec{}),
                                                 scenario.sinr_targets[s], scenario.noise_power[s],
                                                 config.alternation.solver));
        }
        record_solves(row, solves, {});
        break;
      }
      case Baseline::random_irs: {
        const CVec diag = ideal_diag(phaseopt::random_phases(m, derive_seed(seed, 0x2000)));
        std::vector<txbf::SolveResult> solves;
        for (std::size_t s = 0; s < n_bands; ++s) {
          solves.push_back(txbf::solve_power_min(channel::effective_channels(channels.bands[s], diag),
                                                 scenario.sinr_targets[s], scenario.noise_power[s],
                                                 config.alternation.solver));
        }
        record_solves(row, solves, std::vector<CVec>(n_bands, diag));
        break;
      }
      case Baseline::ideal_model: {
        row.feasible = true;
        for (std::size_t s = 0; s < n_bands; ++s) {
          const auto& a = alternation(s);
          shared_ms += alt_ms[s];
          row.outer_iterations += a.outer_iterations;
          row.reflection.push_back(ideal_diag(a.theta));
          if (!a.feasible) {
            row.feasible = false;
            row.band_power_w.push_back(std::numeric_limits<double>::quiet_NaN());
            row.beamformers.emplace_back();
            continue;
          }
          row.beamformers.push_back(a.w);
          row.band_power_w.push_back(a.w.squaredNorm());
          row.total_power_w += row.band_power_w.back();
        }
        if (!row.feasible) row.total_power_w = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      case Baseline::certain_band:
      case Baseline::multi_band_selection: {
        std::vector<RVec> thetas(n_bands);
        std::vector<CMat> ws(n_bands);
        const bool all_bands = baseline == Baseline::multi_band_selection;
        for (std::size_t s = 0; s < n_bands; ++s) {
          if (all_bands || s == config.certain_band) {
            const auto& a = alternation(s);
            shared_ms += alt_ms[s];
            row.outer_iterations += a.outer_iterations;
            thetas[s] = a.theta;
            if (a.feasible) ws[s] = a.w;
          } else {
            // Never served, so its phases are never read.
            thetas[s] = RVec::Zero(static_cast<Eigen::Index>(m));
          }
        }
        allocator::IndicatorMatrix indicator;
        if (all_bands) {
          allocator::SearchOptions opts;
          opts.init = config.search_init;
          opts.init_band = config.certain_band;
          opts.repeat_until_stable = config.repeat_search;
          opts.fixed = fixed;
          opts.solver = config.alternation.solver;
          indicator = allocator::coordinate_search(thetas, ws, channels, scenario, opts).indicator;
        } else {
          indicator = allocator::IndicatorMatrix::serve_all(n_bands, m, config.certain_band);
        }
        const auto eval = allocator::total_power_objective(indicator, thetas, channels, scenario, fixed,
                                                           config.alternation.solver);
        record_solves(row, eval.bands, allocator::apply_indicator(thetas, indicator, fixed));
        row.indicator = indicator.to_string();
        break;
      }
    }
    row.wall_ms = elapsed_ms(start) + shared_ms;
    out.push_back(std::move(row));
  }
  return out;
}

TrialResult run_pipeline(const ExperimentConfig& config, Baseline baseline, std::uint64_t seed) {
  auto rows = run_trial(config, {baseline}, config.scenario, seed);
  return std::move(rows.front());
}

bool ExperimentResult::all_infeasible() const {
  return std::none_of(trials.begin(), trials.end(), [](const TrialResult& t) { return t.feasible; });
}

const SummaryRow* ExperimentResult::find(Baseline b, double sweep_value) const {
  for (const auto& row : summary) {
    if (row.baseline == b && row.sweep_value == sweep_value) return &row;
  }
  return nullptr;
}

namespace {

SummaryRow summarize(Baseline b, double value, const std::vector<const TrialResult*>& rows) {
  SummaryRow s;
  s.baseline = b;
  s.sweep_value = value;
  s.trials = rows.size();
  std::vector<double> dbm;
  double sum_w = 0.0;
  double sum_ms = 0.0;
  for (const auto* r : rows) {
    sum_ms += r->wall_ms;
    if (!r->feasible) continue;
    ++s.feasible;
    sum_w += r->total_power_w;
    dbm.push_back(r->total_power_dbm());
  }
  s.outage_rate = rows.empty() ? 0.0 : 1.0 - static_cast<double>(s.feasible) / static_cast<double>(rows.size());
  s.mean_wall_ms = rows.empty() ? 0.0 : sum_ms / static_cast<double>(rows.size());
  if (dbm.empty()) {
    s.mean_power_w = s.mean_power_dbm = s.median_power_dbm = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean_power_w = sum_w / static_cast<double>(dbm.size());
  s.mean_power_dbm = watts_to_dbm(s.mean_power_w);
  std::sort(dbm.begin(), dbm.end());
  const std::size_t n = dbm.size();
  s.median_power_dbm = n % 2 == 1 ? dbm[n / 2] : 0.5 * (dbm[n / 2 - 1] + dbm[n / 2]);
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* csv,
                                const std::atomic<bool>* stop) {
  config.validate();
  ExperimentResult result;
  if (csv) {
    write_csv_header(*csv);
    csv->flush();
  }
  std::size_t n_threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  n_threads = std::max<std::size_t>(1, std::min(n_threads, config.n_trials));

  auto baseline_rank = [&](Baseline b) {
    return static_cast<std::size_t>(std::find(config.baselines.begin(), config.baselines.end(), b) -
                                    config.baselines.begin());
  };

  for (double value : config.sweep.values) {
    const channel::Scenario scenario = config.scenario_at(value);
    std::vector<std::vector<TrialResult>> per_trial(config.n_trials);
    std::vector<char> done(config.n_trials, 0);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
      for (;;) {
        if (stop && stop->load()) return;
        const std::size_t t = next.fetch_add(1);
        if (t >= config.n_trials) return;
        try {
          auto rows = run_trial(config, config.baselines, scenario, trial_seed(config.seed, t));
          for (auto& r : rows) {
            r.sweep_value = value;
            r.trial = t;
          }
          per_trial[t] = std::move(rows);
          done[t] = 1;
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<TrialResult> rows;
    for (std::size_t t = 0; t < config.n_trials; ++t) {
      if (!done[t]) continue;
      for (auto& r : per_trial[t]) rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const TrialResult& a, const TrialResult& b) {
      const auto ra = baseline_rank(a.baseline);
      const auto rb = baseline_rank(b.baseline);
      return ra != rb ? ra < rb : a.trial < b.trial;
    });
    if (csv) {
      for (const auto& r : rows) write_csv_row(*csv, r);
      csv->flush();
    }
    for (Baseline b : config.baselines) {
      std::vector<const TrialResult*> mine;
      for (const auto& r : rows) {
        if (r.baseline == b) mine.push_back(&r);
      }
      if (!mine.empty()) result.summary.push_back(summarize(b, value, mine));
    }
    for (auto& r : rows) result.trials.push_back(std::move(r));

    if (stop && stop->load()) {
      result.interrupted = true;
      break;
    }
  }
  return result;
}

void write_csv_header(std::ostream& out) {
  out << "baseline,sweep_variable,sweep_value,trial,seed,total_power_dbm,outage,outer_iterations,wall_ms\n";
}

void write_csv_row(std::ostream& out, const TrialResult& row) {
  out << to_string(row.baseline) << ',' << to_string(row.sweep_variable) << ','
      << format_number(row.sweep_value, "%.10g") << ',' << row.trial << ',' << row.seed << ','
      << format_number(row.total_power_dbm(), "%.12g") << ',' << (row.feasible ? 0 : 1) << ','
      << row.outer_iterations << ',' << format_number(row.wall_ms, "%.3f") << '\n';
}

void write_summary_csv(std::ostream& out, SweepVariable variable, const std::vector<SummaryRow>& rows) {
  out << "baseline,sweep_variable,sweep_value,trials,feasible,mean_power_dbm,median_power_dbm,outage_rate,"
         "mean_wall_ms\n";
  for (const auto& r : rows) {
    out << to_string(r.baseline) << ',' << to_string(variable) << ',' << format_number(r.sweep_value, "%.10g")
        << ',' << r.trials << ',' << r.feasible << ',' << format_number(r.mean_power_dbm, "%.6f") << ','
        << format_number(r.median_power_dbm, "%.6f") << ',' << format_number(r.outage_rate, "%.4f") << ','
        << format_number(r.mean_wall_ms, "%.3f") << '\n';
  }
}

double audited_power(const TrialResult& row) {
  double p = 0.0;
  for (const auto& w : row.beamformers) p += w.squaredNorm();
  return p;
}

std::vector<std::vector<double>> audited_sinrs(const TrialResult& row, const channel::ChannelSet& channels,
                                               const channel::Scenario& scenario) {
  std::vector<std::vector<double>> out;
  for (std::size_t s = 0; s < scenario.n_bands(); ++s) {
    const CVec diag = row.reflection.empty() ? CVec{} : row.reflection.at(s);
    const auto h = channel::effective_channels(channels.bands[s], diag);
    out.push_back(channel::band_sinrs(h, row.beamformers.at(s), scenario.noise_power[s]));
  }
  return out;
}

}  // namespace irs::harness
