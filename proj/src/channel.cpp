#include "irs/channel.hpp"

#include "irs/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace irs::channel {
namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec_to_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

CVec vec_from_json(const json& j) {
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

constexpr std::uint64_t kStreamPositions = 0;
constexpr std::uint64_t kStreamBsIrs = 1;
constexpr std::uint64_t kStreamIrsUser = 2;
constexpr std::uint64_t kStreamBsUser = 3;

void fill_gaussian(Rng& rng, double amplitude, CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = amplitude * rng.complex_normal();
}

}  // namespace

std::size_t Scenario::total_users() const {
  std::size_t n = 0;
  for (auto k : users_per_band) n += k;
  return n;
}

void Scenario::validate() const {
  const std::size_t s = n_bands();
  if (s == 0) throw std::invalid_argument("scenario needs at least one band");
  for (double f : band_frequencies) {
    if (!(f > 0.0)) throw std::invalid_argument("band frequencies must be positive");
  }
  if (n_tx == 0) throw std::invalid_argument("n_tx must be at least 1");
  if (n_elements == 0) throw std::invalid_argument("n_elements must be at least 1");
  if (users_per_band.size() != s || noise_power.size() != s || sinr_targets.size() != s) {
    throw std::invalid_argument("per-band lists must have one entry per band");
  }
  for (std::size_t b = 0; b < s; ++b) {
    if (users_per_band[b] == 0) throw std::invalid_argument("every band needs at least one user");
    if (noise_power[b].size() != users_per_band[b] || sinr_targets[b].size() != users_per_band[b]) {
      throw std::invalid_argument("per-user lists must match users_per_band");
    }
    for (double v : noise_power[b]) {
      if (!(v > 0.0)) throw std::invalid_argument("noise power must be positive");
    }
    for (double v : sinr_targets[b]) {
      if (!(v > 0.0)) throw std::invalid_argument("SINR targets must be positive");
    }
  }
  if (!(bs_irs_distance > 0.0) || !(bs_user_distance > 0.0) || !(irs_user_distance > 0.0)) {
    throw std::invalid_argument("distances must be positive");
  }
}

void Scenario::set_sinr_db(double db) {
  for (auto& band : sinr_targets) {
    for (auto& v : band) v = db_to_linear(db);
  }
}

void Scenario::set_noise_dbm(double dbm) {
  for (auto& band : noise_power) {
    for (auto& v : band) v = dbm_to_watts(dbm);
  }
}

void Scenario::set_users_per_band(const std::vector<std::size_t>& users) {
  if (users.size() != n_bands()) throw std::invalid_argument("users list must have one entry per band");
  users_per_band = users;
  for (std::size_t b = 0; b < users.size(); ++b) {
    const double gamma = sinr_targets[b].empty() ? 1.0 : sinr_targets[b].front();
    const double noise = noise_power[b].empty() ? 1e-11 : noise_power[b].front();
    sinr_targets[b].resize(users[b], gamma);
    noise_power[b].resize(users[b], noise);
  }
}

Scenario Scenario::uniform(std::vector<double> bands, std::size_t n_tx, std::size_t users_per_band,
                           std::size_t n_elements, double sinr_db, double noise_dbm,
                           std::uint64_t seed) {
  Scenario s;
  const std::size_t n = bands.size();
  s.band_frequencies = std::move(bands);
  s.n_tx = n_tx;
  s.n_elements = n_elements;
  s.users_per_band.assign(n, users_per_band);
  s.sinr_targets.assign(n, std::vector<double>(users_per_band, db_to_linear(sinr_db)));
  s.noise_power.assign(n, std::vector<double>(users_per_band, dbm_to_watts(noise_dbm)));
  s.rng_seed = seed;
  return s;
}

double path_loss(double reference_loss_db, double distance, double exponent) {
  return std::pow(10.0, -reference_loss_db / 10.0) * std::pow(std::max(distance, 1.0), -exponent);
}

ChannelSet generate(const Scenario& scenario) {
  scenario.validate();
  const auto m = static_cast<Eigen::Index>(scenario.n_elements);
  const auto nt = static_cast<Eigen::Index>(scenario.n_tx);
  const auto& pl = scenario.exponents;
  const double g_amp =
      std::sqrt(path_loss(scenario.reference_loss_db, scenario.bs_irs_distance, pl.bs_irs));

  ChannelSet set;
  set.bands.resize(scenario.n_bands());
  for (std::size_t b = 0; b < scenario.n_bands(); ++b) {
    BandChannels& band = set.bands[b];
    const std::size_t k_users = scenario.users_per_band[b];
    const std::uint64_t band_seed = derive_seed(scenario.rng_seed, b);

    Rng pos_rng(derive_seed(band_seed, kStreamPositions));
    band.users.resize(k_users);
    for (auto& user : band.users) {
      const double u_r = pos_rng.uniform();
      const double angle = pos_rng.phase();
      switch (scenario.placement) {
        case Placement::fixed:
          user = {scenario.bs_user_distance, scenario.irs_user_distance};
          break;
        case Placement::disc:
        case Placement::circle: {
          const double radius = scenario.placement == Placement::disc
                                    ? scenario.irs_user_distance * std::sqrt(u_r)
                                    : scenario.irs_user_distance;
          // BS at the origin, IRS on the x axis.
          const double x = scenario.bs_irs_distance + radius * std::cos(angle);
          const double y = radius * std::sin(angle);
          user = {std::hypot(x, y), radius};
          break;
        }
      }
    }

    // Element-indexed draws come first in their streams, so a larger surface
    // extends a smaller one drawn from the same seed.
    Rng g_rng(derive_seed(band_seed, kStreamBsIrs));
    band.g.resize(m, nt);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < nt; ++c) band.g(r, c) = g_amp * g_rng.complex_normal();
    }
    band.h_r.assign(k_users, CVec(m));
    for (std::size_t k = 0; k < k_users; ++k) {
      Rng r_rng(derive_seed(derive_seed(band_seed, kStreamIrsUser), k));
      fill_gaussian(r_rng,
                    std::sqrt(path_loss(scenario.reference_loss_db, band.users[k].irs_distance,
                                        pl.irs_user)),
                    band.h_r[k]);
    }
    Rng d_rng(derive_seed(band_seed, kStreamBsUser));
    band.h_d.assign(k_users, CVec(nt));
    for (std::size_t k = 0; k < k_users; ++k) {
      fill_gaussian(d_rng,
                    std::sqrt(path_loss(scenario.reference_loss_db, band.users[k].bs_distance,
                                        pl.bs_user)),
                    band.h_d[k]);
    }
  }
  return set;
}

CVec combined_channel(const CVec& h_r, const CVec& theta_diag, const CMat& g, const CVec& h_d) {
  if (h_r.size() != g.rows() || theta_diag.size() != g.rows() || h_d.size() != g.cols()) {
    throw std::invalid_argument("combined_channel: dimension mismatch");
  }
  // (h_r^H Theta G)^H = G^H Theta^H h_r
  return g.adjoint() * (theta_diag.conjugate().cwiseProduct(h_r)) + h_d;
}

std::vector<CVec> effective_channels(const BandChannels& band, const CVec& theta_diag) {
  std::vector<CVec> out;
  out.reserve(band.h_d.size());
  for (std::size_t k = 0; k < band.h_d.size(); ++k) {
    out.push_back(theta_diag.size() == 0 ? band.h_d[k]
                                         : combined_channel(band.h_r[k], theta_diag, band.g, band.h_d[k]));
  }
  return out;
}

double sinr(const CVec& h, const CMat& w, std::size_t k, double noise) {
  if (h.size() != w.rows() || static_cast<Eigen::Index>(k) >= w.cols()) {
    throw std::invalid_argument("sinr: dimension mismatch");
  }
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double p = std::norm(h.dot(w.col(j)));
    if (j == static_cast<Eigen::Index>(k)) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + noise);
}

std::vector<double> band_sinrs(const std::vector<CVec>& h, const CMat& w,
                               const std::vector<double>& noise) {
  if (h.size() != noise.size() || static_cast<Eigen::Index>(h.size()) != w.cols()) {
    throw std::invalid_argument("band_sinrs: one channel and noise power per beamformer column");
  }
  std::vector<double> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) out[k] = sinr(h[k], w, k, noise[k]);
  return out;
}

void write_channel_set(std::ostream& out, const ChannelSet& set) {
  json root;
  root["bands"] = json::array();
  for (const auto& band : set.bands) {
    json b;
    json g = json::array();
    for (Eigen::Index r = 0; r < band.g.rows(); ++r) g.push_back(vec_to_json(band.g.row(r).transpose()));
    b["G"] = std::move(g);
    b["h_r"] = json::array();
    for (const auto& v : band.h_r) b["h_r"].push_back(vec_to_json(v));
    b["h_d"] = json::array();
    for (const auto& v : band.h_d) b["h_d"].push_back(vec_to_json(v));
    b["users"] = json::array();
    for (const auto& u : band.users) b["users"].push_back({{"bs_distance", u.bs_distance}, {"irs_distance", u.irs_distance}});
    root["bands"].push_back(std::move(b));
  }
  out << root.dump(1) << '\n';
}

ChannelSet read_channel_set(std::istream& in) {
  const json root = json::parse(in);
  ChannelSet set;
  for (const auto& b : root.at("bands")) {
    BandChannels band;
    const auto& g = b.at("G");
    const auto rows = static_cast<Eigen::Index>(g.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(g[0].size());
    band.g.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const CVec row = vec_from_json(g[static_cast<std::size_t>(r)]);
      if (row.size() != cols) throw std::invalid_argument("ragged G matrix");
      band.g.row(r) = row.transpose();
    }
    for (const auto& v : b.at("h_r")) band.h_r.push_back(vec_from_json(v));
    for (const auto& v : b.at("h_d")) band.h_d.push_back(vec_from_json(v));
    if (b.contains("users")) {
      for (const auto& u : b["users"]) {
        band.users.push_back({u.at("bs_distance").get<double>(), u.at("irs_distance").get<double>()});
      }
    }
    set.bands.push_back(std::move(band));
  }
  return set;
}

}  // namespace irs::channel
