#pragma once

// Phase design on the unit-modulus manifold. For fixed beamformers the
// weighted combined gain
//
//   sum_k omega_k |v^H d_k + beta_k|^2,   omega_k = 1 / (gamma_k sigma_k^2)
//
// is a quadratic v^H D v + 2 Re(v^H b) + constant in the phase vector v,
// where v_m = exp(-j theta_m). The optimizer minimizes its negation
// f(v) = -v^H D v - 2 Re(v^H b) with Riemannian conjugate gradient.

#include "irs/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace irs::phaseopt {

struct QuadraticPhaseObjective {
  CMat d;               ///< Hermitian PSD, M x M
  CVec b;               ///< length M
  double constant = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(b.size()); }
  /// v^H D v + 2 Re(v^H b) + constant.
  double gain(const CVec& v) const;
  /// -v^H D v - 2 Re(v^H b), the minimized cost.
  double cost(const CVec& v) const;
};

/// Build D, b and the constant from the reflected and direct channels of one
/// band and its beamformer columns.
QuadraticPhaseObjective build_objective(const std::vector<CVec>& h_r, const CMat& g,
                                        const std::vector<CVec>& h_d, const CMat& w,
                                        const std::vector<double>& sinr_targets,
                                        const std::vector<double>& noise_powers);

/// Conjugate-convention Euclidean gradient of the cost: -2 (D v + b).
CVec euclidean_gradient(const QuadraticPhaseObjective& obj, const CVec& v);

/// Projection of an ambient vector onto the tangent space at v.
CVec project_tangent(const CVec& v, const CVec& ambient);

/// Element-wise normalization back onto the manifold.
CVec retract(const CVec& v);

struct PhaseOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;
};

enum class Termination { converged, max_iterations, line_search_failed };

struct PhaseResult {
  CVec v;
  std::vector<double> trace;  ///< cost per accepted iterate, starting with v0
  std::size_t iterations = 0;
  Termination termination = Termination::max_iterations;
  double gradient_norm = 0.0;  ///< Riemannian gradient norm at v
};

PhaseResult optimize_phases(const QuadraticPhaseObjective& obj, const CVec& v0,
                            const PhaseOptions& options = {});

/// v_m = exp(-j theta_m) and back.
CVec phases_to_vector(const RVec& theta);
RVec vector_to_phases(const CVec& v);

/// Uniform random phases in [0, 2 pi).
RVec random_phases(std::size_t m, std::uint64_t seed);

}  // namespace irs::phaseopt
