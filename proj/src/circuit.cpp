#include "irs/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace irs::circuit {
namespace {

constexpr Complex kJ{0.0, 1.0};

void require_positive(double c, double f) {
  if (!(c > 0.0)) throw std::domain_error("capacitance must be positive");
  if (!(f > 0.0)) throw std::domain_error("frequency must be positive");
}

// Numerator and denominator of Z = jwL1 (jwL2 + 1/(jwC) + R) / (jwL1 + jwL2 + 1/(jwC) + R).
struct ImpedanceParts {
  Complex num;
  Complex den;
};

ImpedanceParts impedance_parts(const ElementCircuit& k, double c, double f) {
  const double w = kTwoPi * f;
  const Complex series = kJ * w * k.l2 + 1.0 / (kJ * w * c) + k.r;
  const Complex shunt = kJ * w * k.l1;
  return {shunt * series, shunt + series};
}

double wrap_phase(double a) {
  double p = std::fmod(a, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

double rad_to_deg(double r) { return r * 180.0 / kPi; }

std::vector<double> sample_grid(double lo, double hi, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return c;
}

// Sequential unwrap of wrapped phases, in degrees.
std::vector<double> unwrapped_phase_deg(const ElementCircuit& k, const std::vector<double>& caps,
                                        double f) {
  std::vector<double> out(caps.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    double p = rad_to_deg(reflection(k, caps[i], f).phase);
    if (i > 0) {
      p += 360.0 * std::round((prev - p) / 360.0);
    }
    out[i] = p;
    prev = p;
  }
  return out;
}

// Running min/max of one band's unwrapped phase over a growing window.
struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return std::min(hi - lo, 360.0); }
};

double window_span(const std::vector<double>& phase, std::size_t i, std::size_t j) {
  Extent e;
  for (std::size_t t = i; t <= j; ++t) e.add(phase[t]);
  return e.span();
}

}  // namespace

void ElementCircuit::validate() const {
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw std::invalid_argument("inductances must be positive");
  if (!(r >= 0.0)) throw std::invalid_argument("resistance must be non-negative");
  if (!(z0 > 0.0)) throw std::invalid_argument("free-space impedance must be positive");
  if (!(c_min > 0.0) || !(c_min < c_max)) {
    throw std::invalid_argument("capacitance range must satisfy 0 < c_min < c_max");
  }
}

ElementCircuit ElementCircuit::smv1231() {
  return ElementCircuit{2.5e-9, 0.7e-9, 1.0, 377.0, 0.2e-12, 3.0e-12};
}

const BandStatus* BandStatusTable::tunable_for(std::size_t band) const {
  for (const auto& s : statuses) {
    if (s.tunable_band && *s.tunable_band == band) return &s;
  }
  return nullptr;
}

const BandStatus* BandStatusTable::no_tuning() const {
  for (const auto& s : statuses) {
    if (!s.tunable_band) return &s;
  }
  return nullptr;
}

std::size_t BandStatusTable::tunable_count() const {
  return static_cast<std::size_t>(std::count_if(
      statuses.begin(), statuses.end(), [](const BandStatus& s) { return s.tunable_band.has_value(); }));
}

Complex impedance(const ElementCircuit& circuit, double c, double f) {
  require_positive(c, f);
  const auto [num, den] = impedance_parts(circuit, c, f);
  if (den == Complex{0.0, 0.0}) throw std::domain_error("impedance unbounded at parallel resonance");
  return num / den;
}

ReflectionResponse reflection(const ElementCircuit& circuit, double c, double f) {
  require_positive(c, f);
  const auto [num, den] = impedance_parts(circuit, c, f);
  // (Z - Z0)/(Z + Z0) with Z = num/den, cleared of the den division.
  const Complex top = num - circuit.z0 * den;
  const Complex bottom = num + circuit.z0 * den;
  const double scale = std::abs(num) + circuit.z0 * std::abs(den);
  if (!(std::abs(bottom) > 1e-14 * scale)) {
    throw DegenerateReflection("Z + Z0 vanishes; reflection coefficient undefined");
  }
  const Complex phi = top / bottom;
  ReflectionResponse out;
  out.phase = wrap_phase(std::arg(phi));
  out.amplitude = circuit.r == 0.0 ? 1.0 : std::min(1.0, std::abs(phi));
  return out;
}

double phase_span(const ElementCircuit& circuit, CapacitanceInterval interval, double f,
                  std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("phase_span needs at least two samples");
  if (!(interval.lo <= interval.hi)) throw std::invalid_argument("interval bounds reversed");
  const double slack = 1e-9 * circuit.c_max;
  if (interval.lo < circuit.c_min - slack || interval.hi > circuit.c_max + slack) {
    throw std::invalid_argument("interval outside the element's capacitance range");
  }
  if (interval.lo == interval.hi) return 0.0;

  std::vector<double> phases;
  phases.reserve(n_samples);
  for (double c : sample_grid(interval.lo, interval.hi, n_samples)) {
    phases.push_back(reflection(circuit, c, f).phase);
  }
  std::sort(phases.begin(), phases.end());
  double widest_gap = phases.front() + kTwoPi - phases.back();
  for (std::size_t i = 1; i < phases.size(); ++i) {
    widest_gap = std::max(widest_gap, phases[i] - phases[i - 1]);
  }
  return rad_to_deg(kTwoPi - widest_gap);
}

BandStatusTable derive_status_table(const ElementCircuit& circuit, const std::vector<double>& bands,
                                    double tunable_threshold_deg, double fixed_threshold_deg,
                                    std::size_t n_samples) {
  circuit.validate();
  if (bands.empty()) throw std::invalid_argument("band list is empty");
  for (std::size_t s = 1; s < bands.size(); ++s) {
    if (!(bands[s] > bands[s - 1])) throw std::invalid_argument("bands must be strictly increasing");
  }
  if (!(tunable_threshold_deg > fixed_threshold_deg) || !(fixed_threshold_deg > 0.0)) {
    throw std::invalid_argument("thresholds must satisfy tunable > fixed > 0");
  }
  if (n_samples < 3) throw std::invalid_argument("status derivation needs at least three samples");

  const std::size_t n_bands = bands.size();
  const std::vector<double> caps = sample_grid(circuit.c_min, circuit.c_max, n_samples);
  std::vector<std::vector<double>> phase(n_bands);
  for (std::size_t s = 0; s < n_bands; ++s) phase[s] = unwrapped_phase_deg(circuit, caps, bands[s]);

  // Cell t joins samples t and t+1.
  std::vector<bool> claimed(n_samples - 1, false);
  const double step_rate = tunable_threshold_deg / static_cast<double>(n_samples - 1);

  auto others_flat = [&](std::size_t band, std::size_t i, std::size_t j) {
    for (std::size_t o = 0; o < n_bands; ++o) {
      if (o != band && window_span(phase[o], i, j) >= fixed_threshold_deg) return false;
    }
    return true;
  };

  auto make_status = [&](std::size_t i, std::size_t j, std::optional<std::size_t> band) {
    BandStatus st;
    st.interval = {caps[i], caps[j]};
    st.tunable_band = band;
    for (std::size_t s = 0; s < n_bands; ++s) {
      st.midpoint_phase.push_back(reflection(circuit, st.interval.mid(), bands[s]).phase);
      st.span_deg.push_back(window_span(phase[s], i, j));
    }
    return st;
  };

  BandStatusTable table;
  table.bands = bands;

  for (std::size_t s = 0; s < n_bands; ++s) {
    std::optional<std::pair<std::size_t, std::size_t>> core;
    for (std::size_t i = 0; i + 1 < n_samples; ++i) {
      std::vector<Extent> ext(n_bands);
      for (std::size_t o = 0; o < n_bands; ++o) ext[o].add(phase[o][i]);
      for (std::size_t j = i + 1; j < n_samples; ++j) {
        if (claimed[j - 1]) break;
        bool blocked = false;
        for (std::size_t o = 0; o < n_bands; ++o) {
          ext[o].add(phase[o][j]);
          if (o != s && ext[o].span() >= fixed_threshold_deg) blocked = true;
        }
        if (blocked) break;
        if (ext[s].span() > tunable_threshold_deg) {
          if (!core || j - i < core->second - core->first) core = {i, j};
          break;
        }
      }
    }
    if (!core) continue;

    auto [i, j] = *core;
    for (;;) {
      struct Step {
        bool left;
        double increment;
      };
      std::vector<Step> steps;
      if (i > 0 && !claimed[i - 1]) steps.push_back({true, std::abs(phase[s][i] - phase[s][i - 1])});
      if (j + 1 < n_samples && !claimed[j]) {
        steps.push_back({false, std::abs(phase[s][j + 1] - phase[s][j])});
      }
      std::stable_sort(steps.begin(), steps.end(),
                       [](const Step& a, const Step& b) { return a.increment > b.increment; });
      bool grew = false;
      for (const Step& st : steps) {
        if (st.increment < step_rate) continue;
        const std::size_t ni = st.left ? i - 1 : i;
        const std::size_t nj = st.left ? j : j + 1;
        if (!others_flat(s, ni, nj)) continue;
        i = ni;
        j = nj;
        grew = true;
        break;
      }
      if (!grew) break;
    }
    for (std::size_t t = i; t < j; ++t) claimed[t] = true;
    table.statuses.push_back(make_status(i, j, s));
  }

  std::optional<std::pair<std::size_t, std::size_t>> flat;
  for (std::size_t t = 0; t < claimed.size();) {
    if (claimed[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < claimed.size() && !claimed[end]) ++end;
    // Unclaimed cells [t, end) span samples t..end.
    bool all_flat = true;
    for (std::size_t o = 0; o < n_bands && all_flat; ++o) {
      all_flat = window_span(phase[o], t, end) < fixed_threshold_deg;
    }
    if (all_flat && (!flat || end - t > flat->second - flat->first)) flat = {t, end};
    t = end;
  }
  if (flat) table.statuses.push_back(make_status(flat->first, flat->second, std::nullopt));

  std::sort(table.statuses.begin(), table.statuses.end(),
            [](const BandStatus& a, const BandStatus& b) { return a.interval.lo < b.interval.lo; });
  return table;
}

void write_reflection_sweep_csv(std::ostream& out, const ElementCircuit& circuit,
                                const std::vector<double>& bands, std::size_t n_samples) {
  circuit.validate();
  if (n_samples < 2) throw std::invalid_argument("sweep needs at least two samples");
  out << "capacitance_pf";
  for (double f : bands) out << ",phase_deg_" << f / 1e9 << "ghz";
  for (double f : bands) out << ",amplitude_" << f / 1e9 << "ghz";
  out << '\n';
  const auto old_precision = out.precision(10);
  for (double c : sample_grid(circuit.c_min, circuit.c_max, n_samples)) {
    out << c * 1e12;
    std::vector<ReflectionResponse> resp;
    for (double f : bands) resp.push_back(reflection(circuit, c, f));
    for (const auto& r : resp) out << ',' << rad_to_deg(r.phase);
    for (const auto& r : resp) out << ',' << r.amplitude;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace irs::circuit
