#include "irs/allocator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace irs::allocator {

IndicatorMatrix::IndicatorMatrix(std::size_t n_bands, std::size_t n_elements, std::size_t status)
    : n_bands_(n_bands), status_(n_elements, 0) {
  if (n_bands == 0) throw std::invalid_argument("indicator needs at least one band");
  for (std::size_t m = 0; m < n_elements; ++m) set_status(m, status);
}

IndicatorMatrix IndicatorMatrix::serve_all(std::size_t n_bands, std::size_t n_elements, std::size_t band) {
  return IndicatorMatrix(n_bands, n_elements, band + 1);
}

IndicatorMatrix IndicatorMatrix::from_matrix(const Eigen::MatrixXi& a) {
  IndicatorMatrix out(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (Eigen::Index m = 0; m < a.cols(); ++m) {
    std::size_t status = 0;
    for (Eigen::Index s = 0; s < a.rows(); ++s) {
      const int v = a(s, m);
      if (v != 0 && v != 1) throw std::invalid_argument("indicator entries must be 0 or 1");
      if (v == 1) {
        if (status != 0) throw std::invalid_argument("indicator column serves more than one band");
        status = static_cast<std::size_t>(s) + 1;
      }
    }
    out.status_[static_cast<std::size_t>(m)] = status;
  }
  return out;
}

IndicatorMatrix IndicatorMatrix::from_string(std::size_t n_bands, const std::string& text) {
  IndicatorMatrix out(n_bands, text.size());
  for (std::size_t m = 0; m < text.size(); ++m) {
    const char c = text[m];
    if (c < '0' || c > '9') throw std::invalid_argument("indicator string must contain digits");
    out.set_status(m, static_cast<std::size_t>(c - '0'));
  }
  return out;
}

void IndicatorMatrix::set_status(std::size_t m, std::size_t status) {
  if (status > n_bands_) throw std::invalid_argument("indicator status exceeds band count");
  status_.at(m) = status;
}

Eigen::MatrixXi IndicatorMatrix::to_matrix() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_bands_),
                                            static_cast<Eigen::Index>(status_.size()));
  for (std::size_t m = 0; m < status_.size(); ++m) {
    if (status_[m] != 0) a(static_cast<Eigen::Index>(status_[m] - 1), static_cast<Eigen::Index>(m)) = 1;
  }
  return a;
}

std::string IndicatorMatrix::to_string() const {
  if (n_bands_ > 9) throw std::logic_error("compact indicator strings support at most 9 bands");
  std::string out;
  out.reserve(status_.size());
  for (auto s : status_) out.push_back(static_cast<char>('0' + s));
  return out;
}

FixedPhaseTable::FixedPhaseTable(std::size_t n_bands)
    : n_bands_(n_bands), phase_(n_bands + 1, std::vector<double>(n_bands, 0.0)) {}

FixedPhaseTable FixedPhaseTable::from_circuit(const circuit::ElementCircuit& circuit,
                                              const circuit::BandStatusTable& table) {
  (void)circuit;
  const std::size_t n = table.bands.size();
  FixedPhaseTable out(n);
  if (const auto* none = table.no_tuning()) out.phase_[0] = none->midpoint_phase;
  for (std::size_t s = 0; s < n; ++s) {
    if (const auto* st = table.tunable_for(s)) out.phase_[s + 1] = st->midpoint_phase;
  }
  return out;
}

double FixedPhaseTable::phase(std::size_t status, std::size_t band) const {
  if (phase_.empty()) return 0.0;
  return phase_.at(status).at(band);
}

bool FixedPhaseTable::is_zero() const {
  for (const auto& row : phase_) {
    for (double v : row) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

std::vector<RVec> practical_phases(const std::vector<RVec>& ideal_phases, const IndicatorMatrix& indicator,
                                   const FixedPhaseTable& fixed) {
  if (ideal_phases.size() != indicator.n_bands()) {
    throw std::invalid_argument("practical_phases: one phase vector per band");
  }
  std::vector<RVec> out(ideal_phases.size());
  for (std::size_t s = 0; s < ideal_phases.size(); ++s) {
    if (static_cast<std::size_t>(ideal_phases[s].size()) != indicator.n_elements()) {
      throw std::invalid_argument("practical_phases: phase vector length != element count");
    }
    out[s] = ideal_phases[s];
    for (std::size_t m = 0; m < indicator.n_elements(); ++m) {
      if (!indicator.serves(s, m)) out[s](static_cast<Eigen::Index>(m)) = fixed.phase(indicator.status(m), s);
    }
  }
  return out;
}

std::vector<CVec> apply_indicator(const std::vector<RVec>& ideal_phases, const IndicatorMatrix& indicator,
                                  const FixedPhaseTable& fixed) {
  std::vector<CVec> out;
  for (const RVec& p : practical_phases(ideal_phases, indicator, fixed)) {
    CVec diag(p.size());
    for (Eigen::Index m = 0; m < p.size(); ++m) {
      diag(m) = p(m) == 0.0 ? Complex{1.0, 0.0} : std::polar(1.0, p(m));
    }
    out.push_back(std::move(diag));
  }
  return out;
}

std::vector<CVec> apply_indicator(const std::vector<RVec>& ideal_phases, const Eigen::MatrixXi& indicator,
                                  const FixedPhaseTable& fixed) {
  return apply_indicator(ideal_phases, IndicatorMatrix::from_matrix(indicator), fixed);
}

namespace {

txbf::SolveResult solve_band(std::size_t s, const CVec& diag, const channel::ChannelSet& channels,
                             const channel::Scenario& scenario, const txbf::SolverOptions& solver) {
  return txbf::solve_power_min(channel::effective_channels(channels.bands[s], diag),
                               scenario.sinr_targets[s], scenario.noise_power[s], solver);
}

CVec band_diag(std::size_t s, const RVec& ideal, const IndicatorMatrix& indicator,
               const FixedPhaseTable& fixed) {
  CVec diag(ideal.size());
  for (Eigen::Index m = 0; m < ideal.size(); ++m) {
    const auto mu = static_cast<std::size_t>(m);
    const double p = indicator.serves(s, mu) ? ideal(m) : fixed.phase(indicator.status(mu), s);
    diag(m) = p == 0.0 ? Complex{1.0, 0.0} : std::polar(1.0, p);
  }
  return diag;
}

void check_inputs(const std::vector<RVec>& ideal_phases, const channel::ChannelSet& channels,
                  const channel::Scenario& scenario) {
  if (ideal_phases.size() != scenario.n_bands() || channels.bands.size() != scenario.n_bands()) {
    throw std::invalid_argument("allocator: phases, channels and scenario disagree on band count");
  }
}

}  // namespace

PowerEvaluation total_power_objective(const IndicatorMatrix& indicator, const std::vector<RVec>& ideal_phases,
                                      const channel::ChannelSet& channels,
                                      const channel::Scenario& scenario, const FixedPhaseTable& fixed,
                                      const txbf::SolverOptions& solver) {
  check_inputs(ideal_phases, channels, scenario);
  const auto diags = apply_indicator(ideal_phases, indicator, fixed);
  PowerEvaluation out;
  out.feasible = true;
  for (std::size_t s = 0; s < diags.size(); ++s) {
    out.bands.push_back(solve_band(s, diags[s], channels, scenario, solver));
    if (out.bands.back().usable()) {
      out.total_power += out.bands.back().beamformer.power;
    } else {
      out.feasible = false;
    }
  }
  if (!out.feasible) out.total_power = std::numeric_limits<double>::infinity();
  return out;
}

std::optional<std::size_t> largest_shortfall_band(const std::vector<CMat>& beamformers,
                                                  const channel::ChannelSet& channels,
                                                  const channel::Scenario& scenario,
                                                  const FixedPhaseTable& fixed) {
  if (beamformers.size() != scenario.n_bands()) {
    throw std::invalid_argument("largest_shortfall_band: one beamformer per band");
  }
  const IndicatorMatrix none(scenario.n_bands(), scenario.n_elements);
  std::optional<std::size_t> best;
  double best_shortfall = 0.0;
  for (std::size_t s = 0; s < scenario.n_bands(); ++s) {
    if (beamformers[s].size() == 0) continue;
    const RVec zeros = RVec::Zero(static_cast<Eigen::Index>(scenario.n_elements));
    const auto h = channel::effective_channels(channels.bands[s], band_diag(s, zeros, none, fixed));
    const auto sinrs = channel::band_sinrs(h, beamformers[s], scenario.noise_power[s]);
    double shortfall = 0.0;
    for (std::size_t k = 0; k < sinrs.size(); ++k) {
      shortfall += std::max(0.0, 1.0 - sinrs[k] / scenario.sinr_targets[s][k]);
    }
    // Rounding noise from a perfectly tight solve is not a shortfall.
    if (shortfall > 1e-9 && shortfall > best_shortfall) {
      best_shortfall = shortfall;
      best = s;
    }
  }
  return best;
}

SearchResult coordinate_search(const std::vector<RVec>& ideal_phases, const std::vector<CMat>& beamformers,
                               const channel::ChannelSet& channels, const channel::Scenario& scenario,
                               const SearchOptions& options) {
  check_inputs(ideal_phases, channels, scenario);
  const std::size_t n_bands = scenario.n_bands();
  const std::size_t n_elements = scenario.n_elements;

  std::size_t init_status = 0;
  switch (options.init) {
    case InitRule::largest_shortfall:
      if (auto s = largest_shortfall_band(beamformers, channels, scenario, options.fixed)) init_status = *s + 1;
      break;
    case InitRule::serve_band:
      if (options.init_band >= n_bands) throw std::invalid_argument("init band out of range");
      init_status = options.init_band + 1;
      break;
    case InitRule::serve_none:
      break;
  }

  SearchResult res;
  res.indicator = IndicatorMatrix(n_bands, n_elements, init_status);

  // Per-band solve cache for the incumbent.
  std::vector<double> band_power(n_bands);
  std::vector<bool> band_ok(n_bands);
  auto evaluate = [&](std::size_t s, const IndicatorMatrix& ind) {
    return solve_band(s, band_diag(s, ideal_phases[s], ind, options.fixed), channels, scenario,
                      options.solver);
  };
  for (std::size_t s = 0; s < n_bands; ++s) {
    const auto r = evaluate(s, res.indicator);
    band_ok[s] = r.usable();
    band_power[s] = r.usable() ? r.beamformer.power : std::numeric_limits<double>::infinity();
  }
  auto total_of = [&](const std::vector<double>& p, const std::vector<bool>& ok) {
    double t = 0.0;
    for (std::size_t s = 0; s < n_bands; ++s) {
      if (!ok[s]) return std::numeric_limits<double>::infinity();
      t += p[s];
    }
    return t;
  };
  double incumbent_power = total_of(band_power, band_ok);

  constexpr double kTie = 1e-12;
  for (;;) {
    ++res.passes;
    bool changed = false;
    for (std::size_t m = 0; m < n_elements; ++m) {
      const std::size_t current = res.indicator.status(m);
      std::size_t best_status = current;
      double best_power = incumbent_power;
      std::vector<double> best_bp = band_power;
      std::vector<bool> best_ok = band_ok;

      // Preference order for ties: incumbent, bands 1..S, none.
      std::vector<std::size_t> order;
      for (std::size_t s = 1; s <= n_bands; ++s) order.push_back(s);
      order.push_back(0);
      bool any_feasible = std::isfinite(incumbent_power);
      for (std::size_t cand : order) {
        if (cand == current) continue;
        IndicatorMatrix trial = res.indicator;
        trial.set_status(m, cand);
        ++res.trials;
        std::vector<double> bp = band_power;
        std::vector<bool> ok = band_ok;
        for (std::size_t st : {current, cand}) {
          if (st == 0) continue;
          const auto r = evaluate(st - 1, trial);
          ok[st - 1] = r.usable();
          bp[st - 1] = r.usable() ? r.beamformer.power : std::numeric_limits<double>::infinity();
        }
        // Fixed phases can differ per status, so every band may change.
        if (!options.fixed.is_zero()) {
          for (std::size_t s = 0; s < n_bands; ++s) {
            if (s + 1 == current || s + 1 == cand) continue;
            const auto r = evaluate(s, trial);
            ok[s] = r.usable();
            bp[s] = r.usable() ? r.beamformer.power : std::numeric_limits<double>::infinity();
          }
        }
        const double total = total_of(bp, ok);
        if (!std::isfinite(total)) continue;
        any_feasible = true;
        if (total < best_power - kTie * std::abs(best_power) || !std::isfinite(best_power)) {
          best_status = cand;
          best_power = total;
          best_bp = std::move(bp);
          best_ok = std::move(ok);
        }
      }
      if (!any_feasible) res.infeasible_elements.push_back(m);
      if (best_status != current) {
        res.indicator.set_status(m, best_status);
        band_power = std::move(best_bp);
        band_ok = std::move(best_ok);
        incumbent_power = best_power;
        changed = true;
      }
      res.power_trace.push_back(incumbent_power);
    }
    if (!options.repeat_until_stable || !changed || res.passes >= options.max_passes) break;
  }

  res.total_power = incumbent_power;
  res.feasible = std::isfinite(incumbent_power);
  return res;
}

}  // namespace irs::allocator
