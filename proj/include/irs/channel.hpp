#pragma once

// Multi-band channel realizations (BS->IRS, IRS->user, BS->user) with
// distance-based path loss on top of Rayleigh fading, plus the effective
// channel and SINR evaluations used by every optimizer.

#include "irs/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace irs::channel {

/// How users are placed around the IRS.
enum class Placement {
  disc,    ///< uniform on the disc of radius irs_user_distance
  circle,  ///< uniform on the circle of radius irs_user_distance
  fixed,   ///< nominal bs_user / irs_user distances, no geometry
};

struct PathLossExponents {
  double bs_irs = 2.5;
  double irs_user = 2.8;
  double bs_user = 3.5;
};

struct Scenario {
  std::vector<double> band_frequencies;     ///< hertz, one per band
  std::size_t n_tx = 4;                     ///< antennas per BS
  std::vector<std::size_t> users_per_band;  ///< K_s
  std::size_t n_elements = 16;              ///< M
  double bs_irs_distance = 50.0;            ///< meters
  double bs_user_distance = 50.0;           ///< meters, used by Placement::fixed
  double irs_user_distance = 2.0;           ///< meters
  PathLossExponents exponents;
  double reference_loss_db = 30.0;  ///< attenuation at 1 m
  Placement placement = Placement::disc;
  std::vector<std::vector<double>> noise_power;   ///< watts, [band][user]
  std::vector<std::vector<double>> sinr_targets;  ///< linear, [band][user]
  std::uint64_t rng_seed = 1;

  std::size_t n_bands() const { return band_frequencies.size(); }
  std::size_t total_users() const;

  /// Throws std::invalid_argument when a field breaks its invariant.
  void validate() const;

  /// Same target (dB) for every user.
  void set_sinr_db(double db);
  /// Same noise power (dBm) for every user.
  void set_noise_dbm(double dbm);
  /// Resize K_s, keeping the first user's target/noise for added users.
  void set_users_per_band(const std::vector<std::size_t>& users);

  static Scenario uniform(std::vector<double> bands, std::size_t n_tx, std::size_t users_per_band,
                          std::size_t n_elements, double sinr_db, double noise_dbm,
                          std::uint64_t seed);
};

struct UserGeometry {
  double bs_distance = 0.0;
  double irs_distance = 0.0;
};

struct BandChannels {
  CMat g;                   ///< M x Nt, BS -> IRS
  std::vector<CVec> h_r;    ///< per user, length M, IRS -> user
  std::vector<CVec> h_d;    ///< per user, length Nt, BS -> user
  std::vector<UserGeometry> users;
};

struct ChannelSet {
  std::vector<BandChannels> bands;
};

/// Linear power attenuation 10^(-ref_db/10) * max(d, 1 m)^(-exponent).
double path_loss(double reference_loss_db, double distance, double exponent);

/// Draws one realization, deterministic in scenario.rng_seed. Band b uses
/// base = derive_seed(rng_seed, b) and one stream per component:
///   user positions       derive_seed(base, 0)
///   G, row-major         derive_seed(base, 1)
///   h_r of user k        derive_seed(derive_seed(base, 2), k)
///   every h_d in order   derive_seed(base, 3)
/// The first M' rows of G and entries of h_r therefore do not depend on M.
ChannelSet generate(const Scenario& scenario);

/// Effective channel h with h^H = h_r^H diag(theta) G + h_d^H.
CVec combined_channel(const CVec& h_r, const CVec& theta_diag, const CMat& g, const CVec& h_d);

/// Effective channels of every user of one band. An empty theta_diag drops
/// the reflected path.
std::vector<CVec> effective_channels(const BandChannels& band, const CVec& theta_diag);

/// |h^H w_k|^2 / (sum_{j != k} |h^H w_j|^2 + noise).
double sinr(const CVec& h, const CMat& w, std::size_t k, double noise);

/// SINR of every user of one band under its own effective channel.
std::vector<double> band_sinrs(const std::vector<CVec>& h, const CMat& w,
                               const std::vector<double>& noise);

/// Structured-text interchange: JSON with complex entries as [re, im] pairs.
void write_channel_set(std::ostream& out, const ChannelSet& set);
ChannelSet read_channel_set(std::istream& in);

}  // namespace irs::channel
