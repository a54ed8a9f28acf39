#pragma once

// SINR-constrained transmit power minimization for one band:
//
//   min sum_k ||w_k||^2  s.t.  |h_k^H w_k|^2 / (sum_{j!=k} |h_k^H w_j|^2 + sigma_k^2) >= gamma_k
//
// solved through uplink-downlink duality. The dual (uplink) powers follow the
// fixed point
//
//   lambda_k = 1 / ((1 + 1/gamma_k) h_k^H (I + sum_j lambda_j h_j h_j^H)^{-1} h_k),
//
// which gives the MMSE beam directions; the downlink powers then solve the
// K x K linear system that makes every SINR constraint tight. Each w_k is
// rotated so that h_k^H w_k is real and non-negative.

#include "irs/linalg.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace irs::txbf {

enum class SolveStatus { optimal, infeasible, max_iterations };

std::string_view to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  std::size_t iterations = 0;
  std::vector<double> achieved_sinrs;
  double residual = 0.0;     ///< last relative change of the dual powers
  double duality_gap = 0.0;  ///< |primal - dual| / primal, normalized units
};

/// Beamformers of one band, columns w_k.
struct BandBeamformer {
  CMat w;
  double power = 0.0;  ///< sum_k ||w_k||^2
};

struct BeamformerSet {
  std::vector<BandBeamformer> bands;
  double total_power = 0.0;

  void recompute_total();
};

struct SolveResult {
  BandBeamformer beamformer;
  SolveReport report;

  /// Constraints hold (status optimal or max-iterations with positive powers).
  bool usable() const { return report.status != SolveStatus::infeasible; }
};

struct SolverOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 200;
  /// Dual objective cap, in multiples of max gamma in noise-normalized units.
  double divergence_cap = 1e6;
};

/// Solve the power minimization for the given effective channels (h_k, one
/// per user), linear targets and noise powers. Infeasible targets are
/// reported through the status; the beamformer is empty in that case.
SolveResult solve_power_min(const std::vector<CVec>& channels, const std::vector<double>& sinr_targets,
                            const std::vector<double>& noise_powers, const SolverOptions& options = {});

struct Feasibility {
  bool feasible = false;
  /// min_k(achieved / target) - 1; -1 when infeasible.
  double margin = -1.0;
};

Feasibility feasibility_check(const std::vector<CVec>& channels, const std::vector<double>& sinr_targets,
                              const std::vector<double>& noise_powers, const SolverOptions& options = {});

}  // namespace irs::txbf
