#include "irs/phaseopt.hpp"

#include "irs/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace irs::phaseopt {
namespace {

double real_inner(const CVec& a, const CVec& b) { return std::real(a.dot(b)); }

}  // namespace

double QuadraticPhaseObjective::gain(const CVec& v) const {
  return std::real(v.dot(d * v)) + 2.0 * std::real(v.dot(b)) + constant;
}

double QuadraticPhaseObjective::cost(const CVec& v) const {
  return -std::real(v.dot(d * v)) - 2.0 * std::real(v.dot(b));
}

QuadraticPhaseObjective build_objective(const std::vector<CVec>& h_r, const CMat& g,
                                        const std::vector<CVec>& h_d, const CMat& w,
                                        const std::vector<double>& sinr_targets,
                                        const std::vector<double>& noise_powers) {
  const std::size_t k_users = h_r.size();
  if (h_d.size() != k_users || sinr_targets.size() != k_users || noise_powers.size() != k_users ||
      static_cast<std::size_t>(w.cols()) != k_users) {
    throw std::invalid_argument("build_objective: one channel pair, target and beam per user");
  }
  if (w.rows() != g.cols()) throw std::invalid_argument("build_objective: beamformer length != n_tx");
  const Eigen::Index m = g.rows();

  QuadraticPhaseObjective obj;
  obj.d = CMat::Zero(m, m);
  obj.b = CVec::Zero(m);
  for (std::size_t k = 0; k < k_users; ++k) {
    if (h_r[k].size() != m || h_d[k].size() != g.cols()) {
      throw std::invalid_argument("build_objective: channel dimension mismatch");
    }
    const double omega = 1.0 / (sinr_targets[k] * noise_powers[k]);
    const auto col = static_cast<Eigen::Index>(k);
    // d_k = diag(h_r^H) G w_k, beta_k = h_d^H w_k
    const CVec dk = h_r[k].conjugate().cwiseProduct(g * w.col(col));
    const Complex beta = h_d[k].dot(w.col(col));
    obj.d.noalias() += omega * dk * dk.adjoint();
    obj.b += omega * std::conj(beta) * dk;
    obj.constant += omega * std::norm(beta);
  }
  return obj;
}

CVec euclidean_gradient(const QuadraticPhaseObjective& obj, const CVec& v) {
  return -2.0 * (obj.d * v + obj.b);
}

CVec project_tangent(const CVec& v, const CVec& ambient) {
  const RVec radial = ambient.cwiseProduct(v.conjugate()).real();
  return ambient - radial.cast<Complex>().cwiseProduct(v);
}

CVec retract(const CVec& v) {
  CVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    out(i) = a > 0.0 ? v(i) / a : Complex{1.0, 0.0};
  }
  return out;
}

PhaseResult optimize_phases(const QuadraticPhaseObjective& obj, const CVec& v0,
                            const PhaseOptions& options) {
  if (v0.size() != obj.b.size() || obj.d.rows() != obj.b.size() || obj.d.cols() != obj.b.size()) {
    throw std::invalid_argument("optimize_phases: dimension mismatch");
  }
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("optimize_phases: tolerance must be positive");

  PhaseResult res;
  res.v = retract(v0);
  double f = obj.cost(res.v);
  res.trace.push_back(f);

  const double d_norm = obj.d.norm();
  const double b_max = obj.b.size() > 0 ? obj.b.cwiseAbs().maxCoeff() : 0.0;
  if (d_norm == 0.0 && b_max == 0.0) {
    res.termination = Termination::converged;
    return res;
  }
  const double step0 = d_norm > 0.0 ? 1.0 / d_norm : 1.0 / b_max;

  CVec grad = project_tangent(res.v, euclidean_gradient(obj, res.v));
  CVec dir = -grad;
  res.gradient_norm = grad.norm();

  while (res.iterations < options.max_iterations) {
    if (res.gradient_norm <= options.tolerance * (1.0 + std::abs(f))) {
      res.termination = Termination::converged;
      return res;
    }
    double slope = real_inner(grad, dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    double step = step0;
    CVec trial;
    double f_trial = f;
    bool accepted = false;
    for (std::size_t bt = 0; bt <= options.max_backtracks; ++bt) {
      trial = retract(res.v + step * dir);
      f_trial = obj.cost(trial);
      if (f_trial <= f + options.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!accepted) {
      res.termination = Termination::line_search_failed;
      return res;
    }

    ++res.iterations;
    const double decrease = f - f_trial;
    const CVec grad_new = project_tangent(trial, euclidean_gradient(obj, trial));
    // Polak-Ribiere with vector transport by projection.
    const CVec grad_old_t = project_tangent(trial, grad);
    const CVec dir_t = project_tangent(trial, dir);
    const double beta =
        std::max(0.0, real_inner(grad_new, grad_new - grad_old_t) / std::max(grad.squaredNorm(), 1e-300));
    dir = -grad_new + beta * dir_t;

    res.v = trial;
    f = f_trial;
    grad = grad_new;
    res.gradient_norm = grad.norm();
    res.trace.push_back(f);

    const double rel = decrease / std::max(1.0, std::abs(f));
    if (rel < options.tolerance &&
        res.gradient_norm <= 10.0 * options.tolerance * (1.0 + std::abs(f))) {
      res.termination = Termination::converged;
      return res;
    }
  }
  res.termination = Termination::max_iterations;
  return res;
}

CVec phases_to_vector(const RVec& theta) {
  CVec v(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) v(i) = std::polar(1.0, -theta(i));
  return v;
}

RVec vector_to_phases(const CVec& v) {
  RVec theta(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double t = -std::arg(v(i));
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    theta(i) = t;
  }
  return theta;
}

RVec random_phases(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  RVec theta(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = rng.phase();
  return theta;
}

}  // namespace irs::phaseopt
