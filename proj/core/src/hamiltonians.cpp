#include "boundpair/hamiltonians.hpp"

#include <cmath>

namespace boundpair {

namespace {

constexpr cdouble kI{0.0, 1.0};

void require_square_symmetric(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + " must be square");
}

}  // namespace

CMatrix build_h0(const ArrayParams& params) {
  const int n = params.n_atoms();
  const double g = params.gamma0();
  // Exact symmetry: each distance is evaluated once and written twice.
  std::vector<cdouble> by_distance(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) by_distance[k] = -kI * g * std::exp(kI * (params.phi() * k));
  CMatrix h(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) h(r, c) = by_distance[static_cast<std::size_t>(std::abs(r - c))];
  return h;
}

cdouble two_photon_element(const CMatrix& h0, const PairBasis& basis, std::size_t row, std::size_t col) {
  const int r = basis.first0(row), s = basis.second0(row);
  const int rp = basis.first0(col), sp = basis.second0(col);
  cdouble v{0.0, 0.0};
  if (s == sp) v += h0(r, rp);
  if (s == rp) v += h0(r, sp);
  if (r == rp) v += h0(s, sp);
  if (r == sp) v += h0(s, rp);
  return v;
}

CMatrix build_two_photon_h(const ArrayParams& params, const PairBasis& basis) {
  if (basis.n_atoms() != params.n_atoms()) throw DomainError("pair basis does not match atom count");
  const CMatrix h0 = build_h0(params);
  const auto m = static_cast<Eigen::Index>(basis.dim());
  CMatrix a = CMatrix::Zero(m, m);
  const int n = params.n_atoms();
  // Only columns sharing an atom with the row are nonzero.
  for (Eigen::Index row = 0; row < m; ++row) {
    const int r = basis.first0(static_cast<std::size_t>(row));
    const int s = basis.second0(static_cast<std::size_t>(row));
    for (int t = 0; t < n; ++t) {
      // (t, s) and (r, t) partners
      if (t != s) {
        const auto col = static_cast<Eigen::Index>(t < s ? basis.index0(t, s) : basis.index0(s, t));
        a(row, col) += h0(r, t);
      }
      if (t != r) {
        const auto col = static_cast<Eigen::Index>(t < r ? basis.index0(t, r) : basis.index0(r, t));
        a(row, col) += h0(s, t);
      }
    }
  }
  return a;
}

CMatrix apply_two_photon(const CMatrix& h0, const CMatrix& psi) {
  require_square_symmetric(psi, "wavefunction");
  const CMatrix hp = h0 * psi;
  CMatrix out = hp + psi * h0;
  out.diagonal() -= 2.0 * hp.diagonal();
  return out;
}

CMatrix h0_times(const ArrayParams& params, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  if (n != params.n_atoms()) throw DomainError("h0_times: dimension mismatch");
  const cdouble step = std::exp(kI * params.phi());
  const cdouble scale = -kI * params.gamma0();
  CMatrix out(n, x.cols());
  CVector fwd(n), bwd(n);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    fwd(0) = x(0, c);
    for (Eigen::Index r = 1; r < n; ++r) fwd(r) = step * fwd(r - 1) + x(r, c);
    bwd(n - 1) = x(n - 1, c);
    for (Eigen::Index r = n - 2; r >= 0; --r) bwd(r) = step * bwd(r + 1) + x(r, c);
    for (Eigen::Index r = 0; r < n; ++r) out(r, c) = scale * (fwd(r) + bwd(r) - x(r, c));
  }
  return out;
}

Tridiagonal::Tridiagonal(CVector diag, CVector off) : diag_(std::move(diag)), off_(std::move(off)) {
  if (diag_.size() == 0 || off_.size() != diag_.size() - 1)
    throw DomainError("tridiagonal: off-diagonal must be one shorter than diagonal");
}

CMatrix Tridiagonal::dense() const {
  const Eigen::Index n = size();
  CMatrix t = CMatrix::Zero(n, n);
  t.diagonal() = diag_;
  for (Eigen::Index i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = off_(i);
  return t;
}

CMatrix Tridiagonal::times(const CMatrix& x) const {
  const Eigen::Index n = size();
  if (x.rows() != n) throw DomainError("tridiagonal: dimension mismatch");
  CMatrix out(n, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index i = 0; i < n; ++i) {
      cdouble v = diag_(i) * x(i, c);
      if (i > 0) v += off_(i - 1) * x(i - 1, c);
      if (i + 1 < n) v += off_(i) * x(i + 1, c);
      out(i, c) = v;
    }
  return out;
}

CMatrix Tridiagonal::times_right(const CMatrix& x) const { return times(x.transpose()).transpose(); }

Tridiagonal build_h0_inverse(const ArrayParams& params) {
  const int n = params.n_atoms();
  if (n < 2) throw DomainError("tridiagonal inverse needs at least two atoms");
  const double phi = params.phi();
  const double sn = std::sin(phi);
  if (std::abs(sn) < 1e-12) throw DomainError("phi is a multiple of pi: H0 is singular");
  const double g = params.gamma0();
  const double cot = std::cos(phi) / sn;
  CVector diag = CVector::Constant(n, cdouble(-cot / g, 0.0));
  diag(0) = diag(n - 1) = cdouble(-0.5 * cot / g, 0.5 / g);
  CVector off = CVector::Constant(n - 1, cdouble(1.0 / (2.0 * g * sn), 0.0));
  return {std::move(diag), std::move(off)};
}

ChiState to_chi(const CMatrix& psi, ComplexEnergy energy, const ArrayParams& params) {
  require_square_symmetric(psi, "wavefunction");
  // H0 is symmetric, so Psi H0 = (H0 Psi^T)^T.
  const CMatrix left = h0_times(params, psi);
  CMatrix chi = h0_times(params, left.transpose()).transpose();
  return {std::move(chi), energy};
}

CMatrix from_chi(const ChiState& state, const ArrayParams& params) {
  const Tridiagonal t = build_h0_inverse(params);
  return t.times_right(t.times(state.chi));
}

double transformed_residual(const ChiState& state, const ArrayParams& params) {
  const Tridiagonal t = build_h0_inverse(params);
  const CMatrix& chi = state.chi;
  const CMatrix tc = t.times(chi);
  const CMatrix ct = t.times_right(chi);
  CMatrix lhs = tc + ct;
  lhs.diagonal() -= 2.0 * ct.diagonal();
  const CMatrix rhs = 2.0 * state.energy.value() * t.times_right(tc);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace boundpair
