// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. The first argument is the irsopt executable used for the
// reproducibility check.

#include "irs/allocator.hpp"
#include "irs/channel.hpp"
#include "irs/circuit.hpp"
#include "irs/harness.hpp"
#include "irs/phaseopt.hpp"
#include "irs/rng.hpp"
#include "irs/txbf.hpp"
#include "reference.hpp"
#include "socp_barrier.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace irs;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out = body();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %d %-28s %s  (%.2f s / %.0f s)  %s%s\n", id, title, pass ? "PASS" : "FAIL", secs, budget_s,
              out.detail.c_str(), in_time ? "" : "  [over time budget]");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CVec random_vec(Rng& rng, Eigen::Index n) {
  CVec v(n);
  for (auto& x : v) x = rng.complex_normal();
  return v;
}

CMat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c) {
  CMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.complex_normal();
  }
  return m;
}

// ---------------------------------------------------------------------------

Outcome circuit_fidelity() {
  const auto k = circuit::ElementCircuit::smv1231();
  const circuit::CapacitanceInterval sweep{1.3e-12, 2.0e-12};
  const double s1 = circuit::phase_span(k, sweep, 1.885e9);
  const double s2 = circuit::phase_span(k, sweep, 2.345e9);
  const double s3 = circuit::phase_span(k, sweep, 2.605e9);
  std::ostringstream d;
  d.precision(4);
  d << "spans 1.885/2.345/2.605 GHz = " << s1 << "/" << s2 << "/" << s3 << " deg";
  return {s2 >= 240.0 && s1 <= 60.0 && s3 <= 60.0, d.str()};
}

Outcome status_table() {
  const auto k = circuit::ElementCircuit::smv1231();
  const auto table = circuit::derive_status_table(k, {1.885e9, 2.345e9, 2.605e9});
  std::size_t single = 0;
  std::size_t none = 0;
  bool hits = false;
  std::ostringstream d;
  d.precision(4);
  for (const auto& st : table.statuses) {
    if (st.tunable_band) {
      ++single;
      d << "C" << *st.tunable_band + 1;
    } else {
      ++none;
      d << "C_no";
      hits = st.interval.lo <= 0.8e-12 && st.interval.hi >= 0.6e-12;
    }
    d << "=[" << st.interval.lo * 1e12 << "," << st.interval.hi * 1e12 << "] ";
  }
  bool distinct = table.tunable_for(0) && table.tunable_for(1) && table.tunable_for(2);
  return {single == 3 && none == 1 && distinct && hits, d.str() + "pF"};
}

Outcome beamformer_correctness() {
  Rng rng(0xbeef);
  double worst = 0.0;
  double worst_mrt = 0.0;
  std::size_t both = 0;
  std::size_t neither = 0;
  std::size_t disagree = 0;
  std::size_t mrt_cases = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index nt = (t % 2 == 0) ? 2 : 4;
    const std::size_t k = 1 + static_cast<std::size_t>((t / 2) % 3);
    const double path = std::sqrt(channel::path_loss(30.0, 50.0, 3.5));
    std::vector<CVec> h;
    std::vector<double> gamma, noise;
    for (std::size_t u = 0; u < k; ++u) {
      h.push_back(path * random_vec(rng, nt));
      gamma.push_back(db_to_linear(rng.uniform(0.0, 6.0)));
      noise.push_back(1e-11);
    }
    const auto native = txbf::solve_power_min(h, gamma, noise);
    const auto ref = oracle::solve_power_min_barrier(h, gamma, noise);
    if (native.usable() && ref.feasible) {
      ++both;
      worst = std::max(worst, std::abs(native.beamformer.power - ref.power) / ref.power);
    } else if (!native.usable() && !ref.feasible) {
      ++neither;
    } else {
      ++disagree;
    }
    if (k == 1 && native.usable()) {
      ++mrt_cases;
      const double mrt = gamma[0] * noise[0] / h[0].squaredNorm();
      worst_mrt = std::max(worst_mrt, std::abs(native.beamformer.power - mrt) / mrt);
    }
  }
  std::ostringstream d;
  d << "compared " << both << ", both infeasible " << neither << ", disagree " << disagree
    << fmt(", max rel err %.2e", worst) << " (MRT " << mrt_cases << fmt(" cases, %.2e)", worst_mrt);
  return {disagree == 0 && both >= 50 && worst <= 1e-3 && worst_mrt <= 1e-6, d.str()};
}

struct PhaseInstance {
  std::vector<CVec> h_r;
  std::vector<CVec> h_d;
  CMat g;
  CMat w;
  std::vector<double> gamma;
  std::vector<double> noise;
};

// Desk-scale magnitudes: path-loss scaled channels, noise at -80 dBm, and the
// power-minimizing beamformers of a random reflection.
PhaseInstance phase_instance(Rng& rng, Eigen::Index m, Eigen::Index nt, std::size_t k) {
  PhaseInstance in;
  const double a_g = std::sqrt(channel::path_loss(30.0, 50.0, 2.5));
  const double a_r = std::sqrt(channel::path_loss(30.0, 2.0, 2.8));
  const double a_d = std::sqrt(channel::path_loss(30.0, 50.0, 3.5));
  in.g = a_g * random_mat(rng, m, nt);
  for (std::size_t u = 0; u < k; ++u) {
    in.h_r.push_back(a_r * random_vec(rng, m));
    in.h_d.push_back(a_d * random_vec(rng, nt));
    in.gamma.push_back(db_to_linear(rng.uniform(0.0, 6.0)));
    in.noise.push_back(dbm_to_watts(-80.0));
  }
  CVec diag(m);
  for (auto& x : diag) x = std::polar(1.0, rng.phase());
  std::vector<CVec> h;
  for (std::size_t u = 0; u < k; ++u) h.push_back(channel::combined_channel(in.h_r[u], diag, in.g, in.h_d[u]));
  const auto sol = txbf::solve_power_min(h, in.gamma, in.noise);
  in.w = sol.usable() ? sol.beamformer.w : random_mat(rng, nt, static_cast<Eigen::Index>(k));
  return in;
}

phaseopt::QuadraticPhaseObjective objective_of(const PhaseInstance& in) {
  return phaseopt::build_objective(in.h_r, in.g, in.h_d, in.w, in.gamma, in.noise);
}

Outcome phase_optimizer() {
  Rng rng(0x9a5e);
  double worst_gap = -1.0;
  std::size_t grid_fail = 0;
  std::size_t non_monotone = 0;
  for (int t = 0; t < 50; ++t) {
    const auto in = phase_instance(rng, 3, 4, 2);
    const auto obj = objective_of(in);
    const auto grid = oracle::grid_phase_search(obj, 6);
    const auto res = phaseopt::optimize_phases(obj, phaseopt::phases_to_vector(phaseopt::random_phases(3, 1000 + t)));
    // Costs are negative gains; positive gap means the optimizer is worse.
    const double gap = (res.trace.back() - grid.cost) / std::abs(grid.cost);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-4) ++grid_fail;
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      if (res.trace[i] > res.trace[i - 1]) {
        ++non_monotone;
        break;
      }
    }
  }

  double worst_fd = 0.0;
  std::size_t fd_fail = 0;
  for (int t = 0; t < 100; ++t) {
    const auto in = phase_instance(rng, 3 + t % 6, 4, 1 + static_cast<std::size_t>(t % 3));
    const auto obj = objective_of(in);
    CVec v(obj.b.size());
    for (auto& x : v) x = std::polar(1.0, rng.phase());
    const CVec g = phaseopt::euclidean_gradient(obj, v);
    const CVec fd = oracle::finite_difference_gradient(obj, v, 1e-6);
    const double rel = (g - fd).norm() / g.norm();
    worst_fd = std::max(worst_fd, rel);
    if (rel > 1e-5) ++fd_fail;
  }

  // Traces on larger instances as well.
  for (int t = 0; t < 20; ++t) {
    const auto in = phase_instance(rng, 16, 4, 2);
    const auto res = phaseopt::optimize_phases(objective_of(in), phaseopt::phases_to_vector(phaseopt::random_phases(16, t)));
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      if (res.trace[i] > res.trace[i - 1]) {
        ++non_monotone;
        break;
      }
    }
  }

  std::ostringstream d;
  d << "grid misses " << grid_fail << "/50" << fmt(" (worst rel gap %.2e)", worst_gap) << ", FD failures "
    << fd_fail << "/100" << fmt(" (worst %.2e)", worst_fd) << ", non-monotone traces " << non_monotone;
  return {grid_fail == 0 && fd_fail == 0 && non_monotone == 0, d.str()};
}

Outcome objective_equivalence() {
  Rng rng(0xe9);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 2 + t % 15;
    const auto in = phase_instance(rng, m, 1 + t % 4, 1 + static_cast<std::size_t>(t % 3));
    const auto obj = objective_of(in);
    for (int p = 0; p < 100; ++p) {
      RVec theta(m);
      for (auto& x : theta) x = rng.phase();
      const double direct = oracle::direct_weighted_gain(in.h_r, in.g, in.h_d, in.w, theta, in.gamma, in.noise);
      const double quad = obj.gain(phaseopt::phases_to_vector(theta));
      worst = std::max(worst, std::abs(quad - direct) / std::abs(direct));
    }
  }
  return {worst <= 1e-9, fmt("max rel diff %.2e over 5000 points", worst)};
}

Outcome indicator_search() {
  auto cfg = harness::desk_preset();
  double worst = 0.0;
  std::size_t over_5 = 0;
  std::size_t over_certain = 0;
  std::size_t compared = 0;
  for (int t = 0; t < 20; ++t) {
    channel::Scenario sc = cfg.scenario;
    sc.n_elements = static_cast<std::size_t>(4 + t % 3);
    sc.rng_seed = derive_seed(0x51, static_cast<std::uint64_t>(t));
    const auto channels = channel::generate(sc);
    std::vector<RVec> thetas;
    std::vector<CMat> ws;
    for (std::size_t s = 0; s < sc.n_bands(); ++s) {
      const auto a = harness::run_single_band_alternation(
          s, channels, sc, cfg.alternation, phaseopt::random_phases(sc.n_elements, harness::phase_seed(sc.rng_seed, s)));
      thetas.push_back(a.theta);
      ws.push_back(a.feasible ? a.w : CMat{});
    }
    const auto best = oracle::exhaustive_indicator_search(thetas, channels, sc);
    allocator::SearchOptions opts;
    const auto found = allocator::coordinate_search(thetas, ws, channels, sc, opts);
    if (best.feasible && found.feasible) {
      ++compared;
      const double ratio = found.total_power / best.total_power - 1.0;
      worst = std::max(worst, ratio);
      if (ratio > 0.05) ++over_5;
    }
    for (std::size_t band = 0; band < sc.n_bands(); ++band) {
      allocator::SearchOptions init;
      init.init = allocator::InitRule::serve_band;
      init.init_band = band;
      const auto from_band = allocator::coordinate_search(thetas, ws, channels, sc, init);
      const auto certain = allocator::total_power_objective(
          allocator::IndicatorMatrix::serve_all(sc.n_bands(), sc.n_elements, band), thetas, channels, sc);
      if (certain.feasible && !(from_band.total_power <= certain.total_power)) ++over_certain;
    }
  }
  std::ostringstream d;
  d << "compared " << compared << "/20" << fmt(", worst excess %.3f%%", 100.0 * worst) << ", over 5% " << over_5
    << ", above certain-band " << over_certain;
  return {compared == 20 && over_5 == 0 && over_certain == 0, d.str()};
}

// Criteria 7 and 8 share the desk-scale runs.
struct DeskRuns {
  harness::ExperimentConfig sinr_cfg;
  harness::ExperimentConfig elem_cfg;
  harness::ExperimentResult sinr;
  harness::ExperimentResult elem;
};

DeskRuns desk_runs() {
  DeskRuns r;
  r.sinr_cfg = harness::desk_preset();
  r.elem_cfg = harness::desk_preset();
  r.elem_cfg.sweep = {harness::SweepVariable::elements, {8.0, 16.0, 32.0}};
  r.sinr = harness::run_experiment(r.sinr_cfg);
  r.elem = harness::run_experiment(r.elem_cfg);
  return r;
}

double mean_power(const harness::ExperimentResult& res, harness::Baseline b, double x) {
  const auto* row = res.find(b, x);
  return row ? row->mean_power_w : std::nan("");
}

Outcome system_trends(const DeskRuns& runs) {
  using harness::Baseline;
  std::ostringstream d;
  d.precision(4);
  std::size_t broken = 0;
  std::size_t outages = 0;
  for (const auto& t : runs.sinr.trials) outages += t.feasible ? 0 : 1;
  for (const auto& t : runs.elem.trials) outages += t.feasible ? 0 : 1;

  // (a) strictly increasing in the SINR target.
  for (Baseline b : harness::all_baselines()) {
    const auto& xs = runs.sinr_cfg.sweep.values;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double lo = mean_power(runs.sinr, b, xs[i - 1]);
      const double hi = mean_power(runs.sinr, b, xs[i]);
      if (!(hi > lo)) {
        ++broken;
        d << "[a:" << harness::to_string(b) << "@" << xs[i] << "dB] ";
      }
    }
  }
  // (b) non-increasing in M for surface baselines.
  for (Baseline b : {Baseline::ideal_model, Baseline::multi_band_selection, Baseline::certain_band,
                     Baseline::random_irs}) {
    const auto& xs = runs.elem_cfg.sweep.values;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double lo = mean_power(runs.elem, b, xs[i - 1]);
      const double hi = mean_power(runs.elem, b, xs[i]);
      if (!(hi <= lo)) {
        ++broken;
        d << "[b:" << harness::to_string(b) << "@M=" << xs[i] << "] ";
      }
    }
  }
  // (c) ideal <= multi-band-selection <= certain-band <= no-IRS.
  const Baseline chain[] = {Baseline::ideal_model, Baseline::multi_band_selection, Baseline::certain_band,
                            Baseline::no_irs};
  auto check_chain = [&](const harness::ExperimentResult& res, const std::vector<double>& xs, const char* unit) {
    for (double x : xs) {
      for (std::size_t i = 1; i < 4; ++i) {
        const double a = mean_power(res, chain[i - 1], x);
        const double b = mean_power(res, chain[i], x);
        if (!(a <= b)) {
          ++broken;
          d << "[c:" << harness::to_string(chain[i - 1]) << ">" << harness::to_string(chain[i]) << "@" << x << unit
            << "] ";
        }
      }
    }
  };
  check_chain(runs.sinr, runs.sinr_cfg.sweep.values, "dB");
  check_chain(runs.elem, runs.elem_cfg.sweep.values, "M");

  d << "means (dBm) at 0/6 dB:";
  for (Baseline b : harness::all_baselines()) {
    d << " " << harness::to_string(b) << "=" << watts_to_dbm(mean_power(runs.sinr, b, 0.0)) << "/"
      << watts_to_dbm(mean_power(runs.sinr, b, 6.0));
  }
  d << "; outages " << outages << "; violations " << broken;
  return {broken == 0, d.str()};
}

Outcome constraint_audit(const DeskRuns& runs) {
  std::size_t feasible = 0;
  std::size_t failed = 0;
  double worst = 0.0;
  auto audit = [&](const harness::ExperimentConfig& cfg, const harness::ExperimentResult& res) {
    for (const auto& row : res.trials) {
      if (!row.feasible) continue;
      ++feasible;
      channel::Scenario sc = cfg.scenario_at(row.sweep_value);
      sc.rng_seed = row.seed;
      const auto channels = channel::generate(sc);
      const auto sinrs = harness::audited_sinrs(row, channels, sc);
      bool ok = true;
      for (std::size_t s = 0; s < sinrs.size(); ++s) {
        for (std::size_t k = 0; k < sinrs[s].size(); ++k) {
          const double short_by = sc.sinr_targets[s][k] - sinrs[s][k];
          worst = std::max(worst, short_by);
          if (short_by > 1e-6) ok = false;
        }
      }
      if (!ok) ++failed;
    }
  };
  audit(runs.sinr_cfg, runs.sinr);
  audit(runs.elem_cfg, runs.elem);
  std::ostringstream d;
  d << feasible << " feasible trials, " << failed << " failed" << fmt(", worst shortfall %.2e", worst);
  return {failed == 0 && feasible > 0, d.str()};
}

std::string strip_timing(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    out += line.substr(0, line.rfind(','));
    out += '\n';
  }
  return out;
}

Outcome reproducibility(const std::string& exe) {
  if (exe.empty()) return {false, "no irsopt executable given"};
  const auto dir = std::filesystem::temp_directory_path() / "irsopt_acceptance";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "run_a.csv").string();
  const std::string b = (dir / "run_b.csv").string();
  const std::string common = " sweep-sinr --preset desk --trials 10 --seed 7 -o ";
  const int ra = std::system(("\"" + exe + "\"" + common + a + " > /dev/null").c_str());
  const int rb = std::system(("\"" + exe + "\"" + common + b + " > /dev/null").c_str());
  if (ra != 0 || rb != 0) return {false, "irsopt exited with an error"};
  const std::string ca = strip_timing(a);
  const std::string cb = strip_timing(b);
  std::size_t rows = 0;
  for (char c : ca) rows += c == '\n' ? 1 : 0;
  const bool same = !ca.empty() && ca == cb;
  return {same && rows == 1 + 4 * 5 * 10,
          std::to_string(rows) + " lines, " + (same ? "identical" : "different") + " without wall_ms"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  run(1, "circuit fidelity", 1.0, circuit_fidelity);
  run(2, "status table", 1.0, status_table);
  run(3, "beamformer correctness", 30.0, beamformer_correctness);
  run(4, "phase optimizer", 60.0, phase_optimizer);
  run(5, "objective equivalence", 10.0, objective_equivalence);
  run(6, "indicator search", 300.0, indicator_search);

  DeskRuns runs;
  run(7, "system trends", 900.0, [&] {
    runs = desk_runs();
    return system_trends(runs);
  });
  run(8, "constraint audit", 60.0, [&] { return constraint_audit(runs); });
  run(9, "reproducibility", 300.0, [&] { return reproducibility(exe); });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
