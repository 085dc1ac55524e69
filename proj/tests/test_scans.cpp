#include <cmath>
#include <unistd.h>

#include <cstring>
#include <filesystem>

#include "boundpair/scans.hpp"
#include "doctest.h"

using namespace boundpair;

namespace {
std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("boundpair_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  return d;
}
}  // namespace

TEST_CASE("oscillation wavevector of a synthetic signal") {
  std::vector<double> n, a;
  for (int k = 20; k <= 100; ++k) {
    n.push_back(k);
    a.push_back(std::exp(-0.05 * k) * (1.0 + 0.2 * std::cos(0.22 * kPi * k)));
  }
  const auto rep = oscillation_wavevector(n, a);
  CHECK(rep.detected);
  CHECK(std::abs(rep.wavevector - 0.22 * kPi) < 0.01 * kPi);
  CHECK(rep.width > 0.0);
}

TEST_CASE("constant signal has no oscillation") {
  const auto rep = oscillation_wavevector(std::vector<double>(50, 1.0), std::vector<double>(50, 3e-6));
  CHECK_FALSE(rep.detected);
}

TEST_CASE("oscillation analysis needs enough points") {
  CHECK_THROWS_AS(oscillation_wavevector(std::vector<double>(30, 1.0), std::vector<double>(30, 1.0)), DomainError);
}

TEST_CASE("quartic fit of exact data") {
  DispersionCurve c;
  for (int j = 0; j <= 20; ++j) {
    const double x = 0.01 * kPi * j;
    c.samples.push_back({kPi - x, 1.0 + 0.02 * x * x - 0.5 * x * x * x * x, 0.0, 0, 0.0});
  }
  const auto q = quartic_fit(c);
  CHECK(std::abs(q.c2 - 0.02) < 1e-10);
  CHECK(std::abs(q.alpha - 0.5) < 1e-10);
  CHECK(std::abs(q.inv_mass - 0.04) < 1e-10);
  REQUIRE(q.degeneracy.has_value());
  CHECK(*q.degeneracy == doctest::Approx(std::sqrt(0.04)).epsilon(1e-8));
  DispersionCurve short_curve;
  short_curve.samples.assign(c.samples.begin(), c.samples.begin() + 5);
  CHECK_THROWS_AS(quartic_fit(short_curve), DomainError);
}

TEST_CASE("dispersion degeneracy above and below the magic period") {
  BoundSearch s;
  s.check_convergence = false;
  const auto above = ArrayParams::from_period12(2, 1.02);
  const auto deg = degeneracy_wavevector(zone_edge_dispersion(above, 0.01 * kPi, 40, s), above, s);
  REQUIRE(deg.found);
  CHECK(deg.delta_k / kPi == doctest::Approx(0.22).epsilon(0.1));
  CHECK(deg.delta_k >= deg.bracket_lo);
  CHECK(deg.delta_k <= deg.bracket_hi);

  const auto below = ArrayParams::from_period12(2, 0.95);
  CHECK_FALSE(degeneracy_wavevector(zone_edge_dispersion(below, 0.01 * kPi, 40, s), below, s).found);
}

TEST_CASE("fourier transform of a zone-edge plane wave") {
  const int n = 40;
  CMatrix psi = CMatrix::Zero(n, n);
  for (int r = 0; r + 2 < n; ++r) psi(r, r + 2) = psi(r + 2, r) = std::cos(kPi * r);
  const auto f = wavefunction_fourier(psi);
  REQUIRE_FALSE(f.peaks.empty());
  CHECK(f.peaks[0].position == doctest::Approx(kPi));
  CHECK_THROWS_AS(wavefunction_fourier(psi, 0), IndexError);
  CHECK_THROWS_AS(wavefunction_fourier(psi, n), IndexError);
}

TEST_CASE("period scan with cache and argmin") {
  const auto dir = temp_dir("scan");
  const StateCache cache(dir);
  ScanOptions opts;
  opts.cache = &cache;
  const std::vector<double> grid{0.9, 1.0, 1.1};
  const auto a = period_scan(12, grid, opts);
  REQUIRE(a.points.size() == 3);
  CHECK(a.axis_name == "period12");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 3);
  opts.threads = 2;
  const auto b = period_scan(12, grid, opts);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.points[i].ok == b.points[i].ok);
    CHECK(a.points[i].decay == b.points[i].decay);
  }
  CHECK(a.grid_hash == b.grid_hash);
  CHECK(argmin_decay(a).has_value());
  CHECK_THROWS_AS(period_scan(12, {1.0, 0.9}), DomainError);
  CHECK_THROWS_AS(period_scan(12, {1.6}), DomainError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("size scan validates its grid") {
  CHECK_THROWS_AS(size_scan(1.0, {}), DomainError);
  CHECK_THROWS_AS(size_scan(1.0, {3}), DomainError);
  const auto r = size_scan(0.9, {8, 10});
  CHECK(r.axis_name == "n_atoms");
  CHECK(r.points[1].axis == 10.0);
}

TEST_CASE("cache round trip keeps the state bitwise") {
  const auto dir = temp_dir("cache");
  const StateCache cache(dir);
  const auto p = ArrayParams::from_period12(14, 0.9);
  const auto fresh = cached_most_subradiant_bound(p, &cache);
  const auto loaded = cache.load(p);
  REQUIRE(loaded.has_value());
  REQUIRE(loaded->state.has_value());
  CHECK(loaded->state->energy.re == fresh.state->energy.re);
  CHECK(loaded->state->energy.im == fresh.state->energy.im);
  CHECK(loaded->state->psi == fresh.state->psi);
  CHECK(loaded->cls.kind == fresh.cls.kind);
  CHECK(cache.path_for(p).filename().string().size() == 16 + 5);
  CHECK_FALSE(cache.load(p.with_atoms(15)).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("content hash") {
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("a") != content_hash("b"));
}
