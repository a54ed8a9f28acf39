#pragma once

// Per-element band assignment under the frequency-selective constraint: an
// element gives its designed phase to at most one band and a fixed phase to
// every other band.

#include "irs/channel.hpp"
#include "irs/circuit.hpp"
#include "irs/linalg.hpp"
#include "irs/txbf.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace irs::allocator {

/// Status of every element: 0 = serves no band, s + 1 = serves band s.
/// Storing one status per element makes column sparsity structural.
class IndicatorMatrix {
 public:
  IndicatorMatrix() = default;
  IndicatorMatrix(std::size_t n_bands, std::size_t n_elements, std::size_t status = 0);

  static IndicatorMatrix serve_all(std::size_t n_bands, std::size_t n_elements, std::size_t band);
  /// Builds from an S x M binary matrix; throws std::invalid_argument when a
  /// column has more than one nonzero or an entry is not 0/1.
  static IndicatorMatrix from_matrix(const Eigen::MatrixXi& a);
  /// Parses the compact status string ("0" = none, "1".."9" = band).
  static IndicatorMatrix from_string(std::size_t n_bands, const std::string& text);

  std::size_t n_bands() const { return n_bands_; }
  std::size_t n_elements() const { return status_.size(); }
  std::size_t status(std::size_t m) const { return status_.at(m); }
  void set_status(std::size_t m, std::size_t status);
  bool serves(std::size_t band, std::size_t m) const { return status_.at(m) == band + 1; }

  Eigen::MatrixXi to_matrix() const;
  std::string to_string() const;

  friend bool operator==(const IndicatorMatrix&, const IndicatorMatrix&) = default;

 private:
  std::size_t n_bands_ = 0;
  std::vector<std::size_t> status_;
};

/// Phase (radians) that band `band` sees from an element in `status` when the
/// element does not serve that band. The default table is all zeros (e^{j0}).
class FixedPhaseTable {
 public:
  FixedPhaseTable() = default;
  explicit FixedPhaseTable(std::size_t n_bands);

  /// Circuit-accurate table: phases at the midpoint of each status interval.
  /// Statuses missing from the table fall back to zero.
  static FixedPhaseTable from_circuit(const circuit::ElementCircuit& circuit,
                                      const circuit::BandStatusTable& table);

  double phase(std::size_t status, std::size_t band) const;
  bool is_zero() const;

 private:
  std::size_t n_bands_ = 0;
  std::vector<std::vector<double>> phase_;  // [status][band]
};

/// theta_s masked by the indicator: served entries keep theta, the rest get
/// the fixed phase.
std::vector<RVec> practical_phases(const std::vector<RVec>& ideal_phases, const IndicatorMatrix& indicator,
                                   const FixedPhaseTable& fixed = {});

/// diag(exp(j theta^p_s)) for every band, stored as the diagonal.
std::vector<CVec> apply_indicator(const std::vector<RVec>& ideal_phases, const IndicatorMatrix& indicator,
                                  const FixedPhaseTable& fixed = {});

/// Same, from an S x M binary matrix (validates column sparsity).
std::vector<CVec> apply_indicator(const std::vector<RVec>& ideal_phases, const Eigen::MatrixXi& indicator,
                                  const FixedPhaseTable& fixed = {});

struct PowerEvaluation {
  double total_power = 0.0;
  bool feasible = false;
  std::vector<txbf::SolveResult> bands;
};

/// Apply the indicator, re-solve every band's beamformers and sum the power.
PowerEvaluation total_power_objective(const IndicatorMatrix& indicator, const std::vector<RVec>& ideal_phases,
                                      const channel::ChannelSet& channels,
                                      const channel::Scenario& scenario, const FixedPhaseTable& fixed = {},
                                      const txbf::SolverOptions& solver = {});

enum class InitRule { largest_shortfall, serve_band, serve_none };

struct SearchOptions {
  InitRule init = InitRule::largest_shortfall;
  std::size_t init_band = 0;  ///< used by InitRule::serve_band
  bool repeat_until_stable = false;
  std::size_t max_passes = 10;
  FixedPhaseTable fixed;
  txbf::SolverOptions solver;
};

struct SearchResult {
  IndicatorMatrix indicator;
  double total_power = 0.0;
  bool feasible = false;
  std::size_t passes = 0;
  std::size_t trials = 0;
  /// Elements for which no status was feasible (incumbent kept).
  std::vector<std::size_t> infeasible_elements;
  /// Incumbent power after each processed element.
  std::vector<double> power_trace;
};

/// Band that starts the search under InitRule::largest_shortfall: the one
/// whose users lose the most SINR (sum_k max(0, 1 - SINR_k/gamma_k)) when
/// the reflection is replaced by the identity. Returns nullopt when no band
/// has a shortfall.
std::optional<std::size_t> largest_shortfall_band(const std::vector<CMat>& beamformers,
                                                  const channel::ChannelSet& channels,
                                                  const channel::Scenario& scenario,
                                                  const FixedPhaseTable& fixed = {});

/// Single-pass (optionally repeated) per-element status search. Each trial
/// changes one element and keeps the lowest feasible total power; ties
/// prefer the incumbent, then the lower band, then "none".
SearchResult coordinate_search(const std::vector<RVec>& ideal_phases, const std::vector<CMat>& beamformers,
                               const channel::ChannelSet& channels, const channel::Scenario& scenario,
                               const SearchOptions& options = {});

}  // namespace irs::allocator
