#pragma once

// Test-only reference computations written with plain loops, kept apart from
// the library's vectorized code paths.

#include "irs/allocator.hpp"
#include "irs/channel.hpp"
#include "irs/linalg.hpp"
#include "irs/phaseopt.hpp"

#include <cstddef>
#include <vector>

namespace irs::oracle {

/// Element-by-element h with h^H = sum_m conj(h_r[m]) e^{j theta_m} G(m, :) + h_d^H.
CVec loop_combined_channel(const CVec& h_r, const RVec& theta, const CMat& g, const CVec& h_d);

/// SINR of user k from explicit sums.
double loop_sinr(const CVec& h, const CMat& w, std::size_t k, double noise);

/// sum_k |h_k^H w_k|^2 / (gamma_k sigma_k^2) with h_k built by loop_combined_channel.
double direct_weighted_gain(const std::vector<CVec>& h_r, const CMat& g, const std::vector<CVec>& h_d,
                            const CMat& w, const RVec& theta, const std::vector<double>& sinr_targets,
                            const std::vector<double>& noise_powers);

struct GridSearch {
  CVec v;
  double cost = 0.0;
};

/// Exhaustive search of the cost over a 2^bits phase grid per element,
/// followed by closed-form coordinate updates until the cost settles.
GridSearch grid_phase_search(const phaseopt::QuadraticPhaseObjective& obj, int bits);

/// Central-difference gradient of the cost in the conjugate convention:
/// entry m is df/dRe(v_m) + j df/dIm(v_m).
CVec finite_difference_gradient(const phaseopt::QuadraticPhaseObjective& obj, const CVec& v, double step);

struct ExhaustiveIndicator {
  allocator::IndicatorMatrix indicator;
  double total_power = 0.0;
  bool feasible = false;
  std::size_t evaluated = 0;
};

/// Minimum total power over all (S+1)^M indicator matrices.
ExhaustiveIndicator exhaustive_indicator_search(const std::vector<RVec>& ideal_phases,
                                                const channel::ChannelSet& channels,
                                                const channel::Scenario& scenario,
                                                const allocator::FixedPhaseTable& fixed = {});

}  // namespace irs::oracle
