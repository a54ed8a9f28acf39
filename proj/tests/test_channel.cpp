#include <catch_amalgamated.hpp>

#include "irs/channel.hpp"
#include "irs/rng.hpp"
#include "reference.hpp"

#include <cmath>
#include <sstream>

using namespace irs;
using namespace irs::channel;
using Catch::Approx;

namespace {

Scenario small_scenario(std::uint64_t seed) {
  return Scenario::uniform({1.885e9, 2.345e9}, 4, 2, 8, 3.0, -80.0, seed);
}

CVec random_vec(Rng& rng, Eigen::Index n) {
  CVec v(n);
  for (auto& x : v) x = rng.complex_normal();
  return v;
}

CMat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c) {
  CMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.complex_normal();
  }
  return m;
}

}  // namespace

TEST_CASE("rng streams are reproducible", "[rng]") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  // splitmix64 reference output for input 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("complex normal has unit second moment", "[rng]") {
  Rng rng(5);
  double re2 = 0.0;
  double im2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_normal();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  CHECK(re2 / n == Approx(0.5).epsilon(0.02));
  CHECK(im2 / n == Approx(0.5).epsilon(0.02));
}

TEST_CASE("path loss", "[channel]") {
  CHECK(path_loss(30.0, 1.0, 2.5) == Approx(1e-3));
  CHECK(path_loss(30.0, 10.0, 2.0) == Approx(1e-5));
  // Distances below 1 m are clamped.
  CHECK(path_loss(30.0, 0.2, 2.8) == path_loss(30.0, 1.0, 2.8));
}

TEST_CASE("scenario validation", "[channel]") {
  auto s = small_scenario(1);
  CHECK_NOTHROW(s.validate());
  CHECK(s.total_users() == 4);

  auto bad = s;
  bad.n_tx = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.sinr_targets[1][0] = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.noise_power[0].pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.band_frequencies.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(generate(bad), std::invalid_argument);

  s.set_users_per_band({1, 3});
  CHECK(s.sinr_targets[1].size() == 3);
  CHECK(s.noise_power[0].size() == 1);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("generate shapes and determinism", "[channel]") {
  const auto s = small_scenario(9);
  const auto a = generate(s);
  const auto b = generate(s);
  REQUIRE(a.bands.size() == 2);
  for (std::size_t band = 0; band < 2; ++band) {
    CHECK(a.bands[band].g.rows() == 8);
    CHECK(a.bands[band].g.cols() == 4);
    CHECK(a.bands[band].h_r.size() == 2);
    CHECK(a.bands[band].h_d[0].size() == 4);
    CHECK(a.bands[band].g == b.bands[band].g);
    CHECK(a.bands[band].h_r[1] == b.bands[band].h_r[1]);
    for (const auto& u : a.bands[band].users) {
      CHECK(u.irs_distance <= 2.0);
      CHECK(u.bs_distance >= 48.0);
      CHECK(u.bs_distance <= 52.0);
    }
  }
  const auto c = generate(small_scenario(10));
  CHECK(c.bands[0].g != a.bands[0].g);
}

TEST_CASE("circle placement keeps users on the ring", "[channel]") {
  auto s = small_scenario(3);
  s.placement = Placement::circle;
  for (const auto& band : generate(s).bands) {
    for (const auto& u : band.users) CHECK(u.irs_distance == Approx(2.0));
  }
}

TEST_CASE("fading second moments follow path loss", "[channel][property]") {
  auto s = small_scenario(0);
  s.placement = Placement::fixed;
  s.irs_user_distance = 1.0;
  s.bs_user_distance = 50.0;
  const double pl_g = path_loss(30.0, 50.0, 2.5);
  const double pl_r = path_loss(30.0, 1.0, 2.8);
  const double pl_d = path_loss(30.0, 50.0, 3.5);

  double g2 = 0.0, r2 = 0.0, d2 = 0.0;
  std::size_t ng = 0, nr = 0, nd = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    s.rng_seed = seed;
    for (const auto& band : generate(s).bands) {
      g2 += band.g.squaredNorm();
      ng += static_cast<std::size_t>(band.g.size());
      for (const auto& v : band.h_r) {
        r2 += v.squaredNorm();
        nr += static_cast<std::size_t>(v.size());
      }
      for (const auto& v : band.h_d) {
        d2 += v.squaredNorm();
        nd += static_cast<std::size_t>(v.size());
      }
    }
  }
  CHECK(g2 / ng == Approx(pl_g).epsilon(0.05));
  CHECK(r2 / nr == Approx(pl_r).epsilon(0.05));
  CHECK(d2 / nd == Approx(pl_d).epsilon(0.05));
  // 1e-3 at the 1 m reference distance.
  CHECK(r2 / nr == Approx(1e-3).epsilon(0.05));
}

TEST_CASE("combined channel matches the element-wise sum", "[channel][property]") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(t % 7);
    const Eigen::Index nt = 1 + static_cast<Eigen::Index>(t % 4);
    const CVec h_r = random_vec(rng, m);
    const CVec h_d = random_vec(rng, nt);
    const CMat g = random_mat(rng, m, nt);
    RVec theta(m);
    for (auto& x : theta) x = rng.phase();
    CVec diag(m);
    for (Eigen::Index i = 0; i < m; ++i) diag[i] = std::polar(1.0, theta[i]);
    const CVec fast = combined_channel(h_r, diag, g, h_d);
    const CVec slow = oracle::loop_combined_channel(h_r, theta, g, h_d);
    CHECK((fast - slow).norm() <= 1e-12 * (1.0 + slow.norm()));
  }
  CHECK_THROWS_AS(combined_channel(CVec::Ones(3), CVec::Ones(2), CMat::Ones(3, 2), CVec::Ones(2)),
                  std::invalid_argument);
}

TEST_CASE("effective channels without reflection are the direct paths", "[channel]") {
  const auto set = generate(small_scenario(4));
  const auto h = effective_channels(set.bands[0], CVec{});
  REQUIRE(h.size() == 2);
  CHECK(h[0] == set.bands[0].h_d[0]);
  CHECK(h[1] == set.bands[0].h_d[1]);
}

TEST_CASE("sinr matches the explicit sum", "[channel][property]") {
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const CMat w = random_mat(rng, 3, 2);
    const CVec h = random_vec(rng, 3);
    const double noise = rng.uniform(0.01, 2.0);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(sinr(h, w, k, noise) == Approx(oracle::loop_sinr(h, w, k, noise)).epsilon(1e-12));
    }
    const auto all = band_sinrs({h, h}, w, {noise, noise});
    CHECK(all[1] == Approx(oracle::loop_sinr(h, w, 1, noise)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sinr(CVec::Ones(2), CMat::Ones(3, 1), 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sinr(CVec::Ones(3), CMat::Ones(3, 1), 1, 1.0), std::invalid_argument);
}

TEST_CASE("channel sets round-trip through JSON exactly", "[channel]") {
  const auto set = generate(small_scenario(77));
  std::stringstream buf;
  write_channel_set(buf, set);
  const auto back = read_channel_set(buf);
  REQUIRE(back.bands.size() == set.bands.size());
  for (std::size_t b = 0; b < set.bands.size(); ++b) {
    CHECK(back.bands[b].g == set.bands[b].g);
    for (std::size_t k = 0; k < set.bands[b].h_r.size(); ++k) {
      CHECK(back.bands[b].h_r[k] == set.bands[b].h_r[k]);
      CHECK(back.bands[b].h_d[k] == set.bands[b].h_d[k]);
      CHECK(back.bands[b].users[k].bs_distance == set.bands[b].users[k].bs_distance);
    }
  }

  std::istringstream bad(R"({"bands":[{"G":[[[1,0]],[[1,0],[0,1]]],"h_r":[],"h_d":[]}]})");
  CHECK_THROWS_AS(read_channel_set(bad), std::invalid_argument);
  std::istringstream bad_entry(R"({"bands":[{"G":[[[1,0,3]]],"h_r":[],"h_d":[]}]})");
  CHECK_THROWS_AS(read_channel_set(bad_entry), std::invalid_argument);
}

TEST_CASE("larger surfaces extend smaller ones from the same seed", "[channel][property]") {
  auto small = small_scenario(123);
  auto large = small;
  large.n_elements = 20;
  const auto a = generate(small);
  const auto b = generate(large);
  for (std::size_t band = 0; band < 2; ++band) {
    CHECK(b.bands[band].g.topRows(8) == a.bands[band].g);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(b.bands[band].h_r[k].head(8) == a.bands[band].h_r[k]);
      CHECK(b.bands[band].h_d[k] == a.bands[band].h_d[k]);
      CHECK(b.bands[band].users[k].bs_distance == a.bands[band].users[k].bs_distance);
    }
  }
  // Bands draw from separate streams.
  CHECK(a.bands[0].g != a.bands[1].g);
}
