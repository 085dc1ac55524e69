#pragma once

// Finite-array Hamiltonians: the dense single-particle matrix H0, the
// two-photon matrix in the hard-core pair basis, the tridiagonal inverse of
// H0 and the transformation to the edge-loss picture chi = H0 Psi H0.

#include <Eigen/Dense>

#include "boundpair/core.hpp"

namespace boundpair {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// H0[r,s] = -i gamma0 exp(i phi |r - s|).
CMatrix build_h0(const ArrayParams& params);

/// Two-photon Hamiltonian in the pair basis. Its eigenvalues are 2*eps.
///
/// Row (r,s), column (r',s') collects H0[r,r'] d(s,s') + H0[r,s'] d(s,r')
/// + H0[s,s'] d(r,r') + H0[s,r'] d(r,s'); the hard-core states r = s are
/// simply absent from the basis.
CMatrix build_two_photon_h(const ArrayParams& params, const PairBasis& basis);

/// One entry of build_two_photon_h, computed from H0 without materializing
/// the full matrix.
cdouble two_photon_element(const CMatrix& h0, const PairBasis& basis, std::size_t row, std::size_t col);

/// Matrix form of the two-photon problem acting on a symmetric, zero-diagonal
/// wavefunction: H0 Psi + Psi H0 - 2 diag[diag(H0 Psi)].
CMatrix apply_two_photon(const CMatrix& h0, const CMatrix& psi);

/// H0 * X in O(N * cols) using the geometric structure of H0.
CMatrix h0_times(const ArrayParams& params, const CMatrix& x);

/// Complex symmetric tridiagonal matrix.
class Tridiagonal {
 public:
  Tridiagonal(CVector diag, CVector off);

  Eigen::Index size() const noexcept { return diag_.size(); }
  const CVector& diag() const noexcept { return diag_; }
  const CVector& off() const noexcept { return off_; }

  CMatrix dense() const;
  /// T * X
  CMatrix times(const CMatrix& x) const;
  /// X * T
  CMatrix times_right(const CMatrix& x) const;

 private:
  CVector diag_;
  CVector off_;
};

/// Exact inverse of H0: bulk diagonal -cot(phi)/gamma0, corners
/// (-cot(phi)/2 + i/2)/gamma0, off-diagonal 1/(2 gamma0 sin phi).
/// Radiative loss shows up only in the two corner entries.
Tridiagonal build_h0_inverse(const ArrayParams& params);

struct ChiState {
  CMatrix chi;
  ComplexEnergy energy;
};

/// chi = H0 Psi H0, so that Psi = H0^-1 chi H0^-1 with the tridiagonal inverse.
/// This is the convention under which the transformed equation below holds.
ChiState to_chi(const CMatrix& psi, ComplexEnergy energy, const ArrayParams& params);

/// Psi = H0^-1 chi H0^-1.
CMatrix from_chi(const ChiState& state, const ArrayParams& params);

/// Max-norm of T chi + chi T - 2 diag[diag(chi T)] - 2 eps T chi T with T = H0^-1.
/// Vanishes for eigenstates; only sparse products are needed.
double transformed_residual(const ChiState& state, const ArrayParams& params);

}  // namespace boundpair
