#include <cmath>
#include <random>

#include "boundpair/hamiltonians.hpp"
#include "doctest.h"

using namespace boundpair;

namespace {

const cdouble I{0.0, 1.0};

CMatrix random_pair_state(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  CMatrix psi = CMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s) psi(r, s) = psi(s, r) = cdouble(g(gen), g(gen));
  return psi;
}

CVector pair_vector(const CMatrix& psi, const PairBasis& b) {
  CVector v(static_cast<Eigen::Index>(b.dim()));
  for (std::size_t i = 0; i < b.dim(); ++i) v(static_cast<Eigen::Index>(i)) = psi(b.first0(i), b.second0(i));
  return v;
}

}  // namespace

TEST_CASE("single-particle Hamiltonian entries") {
  const auto one = build_h0(ArrayParams::from_period12(1, 1.0));
  REQUIRE(one.rows() == 1);
  CHECK(std::abs(one(0, 0) - (-I)) < 1e-15);

  const auto h2 = build_h0(ArrayParams::from_period12(2, 1.0));
  CHECK(std::abs(h2(0, 1) - cdouble(0.5, -std::sqrt(3.0) / 2)) < 1e-15);

  const auto h3 = build_h0(ArrayParams::from_period12(3, 1.0, 2.0));
  CHECK(std::abs(h3(0, 2) - (-2.0 * I * std::exp(I * kPi / 3.0))) < 1e-15);
}

TEST_CASE("H0 is complex symmetric and Toeplitz") {
  const auto h = build_h0(ArrayParams::from_period12(12, 0.83));
  for (int r = 0; r < 12; ++r)
    for (int s = 0; s < 12; ++s) {
      CHECK(h(r, s) == h(s, r));
      if (r > 0 && s > 0) CHECK(h(r, s) == h(r - 1, s - 1));
    }
}

TEST_CASE("two-photon matrix for two atoms") {
  const auto p = ArrayParams::from_period12(2, 0.77);
  const auto a = build_two_photon_h(p, PairBasis(2));
  REQUIRE(a.rows() == 1);
  CHECK(std::abs(a(0, 0) - (-2.0 * I)) < 1e-15);
}

TEST_CASE("matrix form and apply form agree") {
  for (int n : {3, 6, 11}) {
    const auto p = ArrayParams::from_period12(n, 1.1);
    const PairBasis b(n);
    const auto h0 = build_h0(p);
    const auto a = build_two_photon_h(p, b);
    const auto psi = random_pair_state(n, 7u + static_cast<unsigned>(n));
    const CVector lhs = a * pair_vector(psi, b);
    const CMatrix applied = apply_two_photon(h0, psi);
    const CVector rhs = pair_vector(applied, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(applied.diagonal().cwiseAbs().maxCoeff() < 1e-14);
    for (std::size_t i = 0; i < b.dim(); i += 3)
      for (std::size_t j = 0; j < b.dim(); j += 2)
        CHECK(two_photon_element(h0, b, i, j) == a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
}

TEST_CASE("two-photon matrix is complex symmetric") {
  const auto p = ArrayParams::from_period12(9, 0.95);
  const auto a = build_two_photon_h(p, PairBasis(9));
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fast H0 product matches the dense product") {
  const auto p = ArrayParams::from_period12(30, 1.3, 0.7);
  const auto x = random_pair_state(30, 3);
  CHECK((h0_times(p, x) - build_h0(p) * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tridiagonal inverse of H0") {
  const auto p2 = ArrayParams::from_period12(2, 1.0);
  const auto t2 = build_h0_inverse(p2).dense();
  CHECK(std::abs(t2(0, 0) - cdouble(-std::sqrt(3.0) / 2, 0.5)) < 1e-14);
  CHECK(std::abs(t2(0, 1) - 1.0) < 1e-14);

  for (double phi : {0.3, kPi / 6, 0.7})
    for (int n : {2, 5, 40, 200}) {
      const ArrayParams p(n, phi / (2 * kPi), 1.3);
      const auto t = build_h0_inverse(p);
      const CMatrix prod = build_h0(p) * t.dense();
      CHECK((prod - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
      const CMatrix x = random_pair_state(n, 11);
      CHECK((t.times(x) - t.dense() * x).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((t.times_right(x) - x * t.dense()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("inverse becomes a second-difference stencil at small phase") {
  const double phi = 0.01;
  const ArrayParams p(20, phi / (2 * kPi));
  const auto t = build_h0_inverse(p).dense();
  const double scale = 1.0 / (2.0 * phi);
  CHECK(std::abs(t(5, 4) - scale) / scale < 2 * phi);
  CHECK(std::abs(t(5, 5) + 2.0 * scale) / (2 * scale) < 2 * phi);
  CHECK(std::abs(t(5, 6) - scale) / scale < 2 * phi);
}

TEST_CASE("inverse radiates only through the corners") {
  const auto t = build_h0_inverse(ArrayParams::from_period12(17, 0.9)).dense();
  for (int r = 0; r < 17; ++r)
    for (int s = 0; s < 17; ++s) {
      const bool corner = (r == s) && (r == 0 || r == 16);
      if (!corner) CHECK(std::abs(t(r, s).imag()) == 0.0);
    }
  CHECK(t(0, 0).imag() == doctest::Approx(0.5));
}

TEST_CASE("inverse rejects degenerate phases") {
  CHECK_THROWS_AS(build_h0_inverse(ArrayParams(1, 0.1)), DomainError);
  CHECK_THROWS_AS(build_h0_inverse(ArrayParams(4, 0.5)), DomainError);
}

TEST_CASE("chi transform round trip") {
  const auto p = ArrayParams::from_period12(15, 1.2);
  CHECK(to_chi(CMatrix::Zero(15, 15), {}, p).chi.cwiseAbs().maxCoeff() == 0.0);
  const auto psi = random_pair_state(15, 5);
  const auto chi = to_chi(psi, {0.3, -0.1}, p);
  CHECK((from_chi(chi, p) - psi).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(transformed_residual(chi, p) > 1e-3);
}

TEST_CASE("transformed equation holds for the two-atom eigenstate") {
  const auto p = ArrayParams::from_period12(2, 0.8);
  CMatrix psi = CMatrix::Zero(2, 2);
  psi(0, 1) = psi(1, 0) = 1.0 / std::sqrt(2.0);
  CHECK(transformed_residual(to_chi(psi, {0.0, -1.0}, p), p) < 1e-12);
}
