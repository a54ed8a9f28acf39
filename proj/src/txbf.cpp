#include "irs/txbf.hpp"

#include "irs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irs::txbf {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::max_iterations:
      return "max-iterations";
  }
  return "unknown";
}

void BeamformerSet::recompute_total() {
  total_power = 0.0;
  for (auto& band : bands) {
    band.power = band.w.squaredNorm();
    total_power += band.power;
  }
}

SolveResult solve_power_min(const std::vector<CVec>& channels, const std::vector<double>& sinr_targets,
                            const std::vector<double>& noise_powers, const SolverOptions& options) {
  const std::size_t k_users = channels.size();
  if (k_users == 0) throw std::invalid_argument("solve_power_min needs at least one user");
  if (sinr_targets.size() != k_users || noise_powers.size() != k_users) {
    throw std::invalid_argument("solve_power_min: one target and noise power per user");
  }
  const Eigen::Index nt = channels.front().size();
  for (std::size_t k = 0; k < k_users; ++k) {
    if (channels[k].size() != nt) throw std::invalid_argument("solve_power_min: channel lengths differ");
    if (!(sinr_targets[k] > 0.0) || !(noise_powers[k] > 0.0)) {
      throw std::invalid_argument("solve_power_min: targets and noise powers must be positive");
    }
  }

  SolveResult result;
  result.report.status = SolveStatus::infeasible;

  // Normalize to unit noise and unit largest channel norm: w = w_bar / scale.
  std::vector<CVec> h(k_users);
  double scale = 0.0;
  for (std::size_t k = 0; k < k_users; ++k) {
    h[k] = channels[k] / std::sqrt(noise_powers[k]);
    scale = std::max(scale, h[k].norm());
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) return result;
  for (std::size_t k = 0; k < k_users; ++k) {
    h[k] /= scale;
    if (h[k].squaredNorm() == 0.0) return result;
  }
  const double max_gamma = *std::max_element(sinr_targets.begin(), sinr_targets.end());
  const double cap = options.divergence_cap * max_gamma;

  const CMat identity = CMat::Identity(nt, nt);
  std::vector<double> lambda(k_users, 0.0);
  Eigen::LDLT<CMat> factor;
  auto refactor = [&] {
    CMat cov = identity;
    for (std::size_t j = 0; j < k_users; ++j) cov.noalias() += lambda[j] * h[j] * h[j].adjoint();
    factor.compute(cov);
  };

  bool converged = false;
  std::size_t it = 0;
  double residual = 0.0;
  refactor();
  while (it < options.max_iterations) {
    ++it;
    residual = 0.0;
    double dual_sum = 0.0;
    std::vector<double> next(k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
      const double q = std::real(h[k].dot(factor.solve(h[k])));
      next[k] = 1.0 / ((1.0 + 1.0 / sinr_targets[k]) * q);
      residual = std::max(residual, std::abs(next[k] - lambda[k]) / std::max(1.0, next[k]));
      dual_sum += next[k];
    }
    lambda = std::move(next);
    if (!(dual_sum <= cap)) {
      result.report.iterations = it;
      result.report.residual = residual;
      return result;
    }
    refactor();
    if (residual <= options.tolerance) {
      converged = true;
      break;
    }
  }

  // MMSE directions and the downlink power system A p = 1.
  std::vector<CVec> dir(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    dir[k] = factor.solve(h[k]);
    dir[k].normalize();
  }
  const auto kk = static_cast<Eigen::Index>(k_users);
  Eigen::MatrixXd a(kk, kk);
  for (Eigen::Index k = 0; k < kk; ++k) {
    for (Eigen::Index j = 0; j < kk; ++j) {
      const double g = std::norm(h[static_cast<std::size_t>(k)].dot(dir[static_cast<std::size_t>(j)]));
      a(k, j) = (k == j) ? g / sinr_targets[static_cast<std::size_t>(k)] : -g;
    }
  }
  const Eigen::VectorXd p = a.partialPivLu().solve(Eigen::VectorXd::Ones(kk));
  result.report.iterations = it;
  result.report.residual = residual;
  if (!p.allFinite() || (p.array() <= 0.0).any()) return result;

  CMat w(nt, kk);
  for (Eigen::Index k = 0; k < kk; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const Complex g = h[ks].dot(dir[ks]);
    const Complex rot = std::abs(g) > 0.0 ? std::conj(g) / std::abs(g) : Complex{1.0, 0.0};
    w.col(k) = (std::sqrt(p(k)) / scale) * rot * dir[ks];
  }

  double dual_sum = 0.0;
  for (double l : lambda) dual_sum += l;
  const double primal = p.sum();
  result.report.duality_gap = std::abs(primal - dual_sum) / primal;
  result.report.status = converged ? SolveStatus::optimal : SolveStatus::max_iterations;
  result.report.achieved_sinrs = channel::band_sinrs(channels, w, noise_powers);
  result.beamformer.w = std::move(w);
  result.beamformer.power = result.beamformer.w.squaredNorm();
  return result;
}

Feasibility feasibility_check(const std::vector<CVec>& channels, const std::vector<double>& sinr_targets,
                              const std::vector<double>& noise_powers, const SolverOptions& options) {
  const SolveResult r = solve_power_min(channels, sinr_targets, noise_powers, options);
  Feasibility out;
  if (r.report.status != SolveStatus::optimal) return out;
  out.feasible = true;
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sinr_targets.size(); ++k) {
    ratio = std::min(ratio, r.report.achieved_sinrs[k] / sinr_targets[k]);
  }
  out.margin = ratio - 1.0;
  return out;
}

}  // namespace irs::txbf
