#pragma once

// Equivalent-circuit model of one varactor-tuned reflecting element: an
// inductance L1 in parallel with a series L2-C-R branch, terminated against
// free space. Phase responses are frequency selective, so a capacitance range
// that sweeps the phase at one carrier leaves the others nearly fixed.

#include "irs/linalg.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace irs::circuit {

/// Raised when Z + Z0 vanishes and the reflection coefficient is undefined.
class DegenerateReflection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ElementCircuit {
  double l1 = 0.0;     ///< henries
  double l2 = 0.0;     ///< henries
  double r = 0.0;      ///< ohms
  double z0 = 377.0;   ///< ohms, free-space impedance
  double c_min = 0.0;  ///< farads
  double c_max = 0.0;  ///< farads

  /// Throws std::invalid_argument if any field is outside its physical range.
  void validate() const;

  /// SMV1231-079 varactor element (L1 = 2.5 nH, L2 = 0.7 nH, R = 1 ohm)
  /// over a 0.2-3.0 pF tuning range.
  static ElementCircuit smv1231();
};

struct ReflectionResponse {
  double phase = 0.0;      ///< radians in [0, 2*pi)
  double amplitude = 0.0;  ///< |phi| in [0, 1]
};

/// Closed capacitance interval [lo, hi] in farads.
struct CapacitanceInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

struct BandStatus {
  CapacitanceInterval interval;
  /// Index into BandStatusTable::bands, or nullopt for the no-tuning status.
  std::optional<std::size_t> tunable_band;
  /// Phase (radians) seen by every band at the interval midpoint. For
  /// non-tunable bands this is the fixed phase of the status.
  std::vector<double> midpoint_phase;
  /// Phase span (degrees) of every band over the interval.
  std::vector<double> span_deg;
};

struct BandStatusTable {
  std::vector<double> bands;  ///< hertz, strictly increasing
  std::vector<BandStatus> statuses;

  bool empty() const { return statuses.empty(); }
  const BandStatus* tunable_for(std::size_t band) const;
  const BandStatus* no_tuning() const;
  std::size_t tunable_count() const;
};

inline constexpr double kDefaultTunableThresholdDeg = 180.0;
inline constexpr double kDefaultFixedThresholdDeg = 60.0;
inline constexpr std::size_t kDefaultSweepSamples = 1001;

/// Element impedance Z(C, f). Throws std::domain_error if c <= 0, f <= 0, or
/// the lossless parallel resonance makes Z unbounded.
Complex impedance(const ElementCircuit& circuit, double c, double f);

/// Reflection coefficient (Z - Z0) / (Z + Z0) as amplitude and wrapped phase.
/// Evaluated in a form that stays finite at the parallel resonance.
ReflectionResponse reflection(const ElementCircuit& circuit, double c, double f);

/// Angular extent (degrees) of the smallest circular arc covering the phases
/// sampled uniformly over the interval.
double phase_span(const ElementCircuit& circuit, CapacitanceInterval interval,
                  double f, std::size_t n_samples = kDefaultSweepSamples);

/// Partition [c_min, c_max] into per-band tunable statuses and a no-tuning
/// status.
///
/// For each band in order, the shortest window in which that band spans more
/// than `tunable_threshold_deg` while every other band stays below
/// `fixed_threshold_deg` seeds the status. The window grows one sample at a
/// time, steeper side first, while the added step moves the band's phase by
/// at least tunable_threshold_deg / (n_samples - 1) and the other bands stay
/// below the fixed threshold. Windows never overlap. Leftover gaps where all
/// bands stay below the fixed threshold are no-tuning candidates; the widest
/// one is kept. Gaps that are neither are "mixed" and dropped.
BandStatusTable derive_status_table(
    const ElementCircuit& circuit, const std::vector<double>& bands,
    double tunable_threshold_deg = kDefaultTunableThresholdDeg,
    double fixed_threshold_deg = kDefaultFixedThresholdDeg,
    std::size_t n_samples = kDefaultSweepSamples);

/// CSV rows of (capacitance_pf, phase_deg_b..., amplitude_b...) over
/// [c_min, c_max].
void write_reflection_sweep_csv(std::ostream& out, const ElementCircuit& circuit,
                                const std::vector<double>& bands,
                                std::size_t n_samples = kDefaultSweepSamples);

}  // namespace irs::circuit
