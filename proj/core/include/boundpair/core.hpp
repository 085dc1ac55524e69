#pragma once

// Parameters, unit conventions and the hard-core pair basis shared by every
// other part of the library.
//
// Energies and rates are expressed in units of the single-atom decay rate
// gamma0. Atom positions are 1-based in the public API and 0-based inside
// matrices.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace boundpair {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Phase picked up by light between neighbouring atoms, 2*pi*d/lambda0.
double phi_from_period(double period_ratio);

/// Inverse size of the bound pair, -2 ln cos(2 phi). Requires cos(2 phi) > 0.
double pair_kappa(double phi);

/// Bound-pair energy at the zone edge K = pi, 2 gamma0 cot(2 phi).
double pair_energy_pi(double phi, double gamma0 = 1.0);

/// Array of N identical two-level atoms with spacing d.
///
/// `period_ratio` is d/lambda0. Most callers think in units of lambda0/12
/// (the magic period is 1.0 there); use from_period12 for that.
class ArrayParams {
 public:
  ArrayParams(int n_atoms, double period_ratio, double gamma0 = 1.0);

  static ArrayParams from_period12(int n_atoms, double period12, double gamma0 = 1.0);

  int n_atoms() const noexcept { return n_atoms_; }
  double period_ratio() const noexcept { return period_ratio_; }
  double period12() const noexcept { return 12.0 * period_ratio_; }
  double gamma0() const noexcept { return gamma0_; }

  double phi() const noexcept { return phi_; }
  double kappa() const { return pair_kappa(phi_); }
  double eps_pi() const { return pair_energy_pi(phi_, gamma0_); }

  ArrayParams with_atoms(int n_atoms) const { return {n_atoms, period_ratio_, gamma0_}; }
  ArrayParams with_gamma0(double gamma0) const { return {n_atoms_, period_ratio_, gamma0}; }

  std::string describe() const;

 private:
  int n_atoms_;
  double period_ratio_;
  double gamma0_;
  double phi_;
};

/// Complex eigenenergy eps of a two-photon state; the 2*omega0 offset is
/// never stored. Decaying states have im <= 0.
struct ComplexEnergy {
  double re = 0.0;
  double im = 0.0;

  static ComplexEnergy from(cdouble z) noexcept { return {z.real(), z.imag()}; }
  cdouble value() const noexcept { return {re, im}; }
  double decay() const noexcept { return -im; }
};

/// Unordered pair of distinct atoms, 1-based, r < s.
struct AtomPair {
  int r = 0;
  int s = 0;
  friend bool operator==(const AtomPair&, const AtomPair&) = default;
};

/// Lexicographic enumeration of the N(N-1)/2 pairs r < s.
///
/// (1,2), (1,3), ..., (1,N), (2,3), ... so the index of a pair does not
/// depend on N once the first atom is fixed to 1.
class PairBasis {
 public:
  explicit PairBasis(int n_atoms);

  int n_atoms() const noexcept { return n_atoms_; }
  std::size_t dim() const noexcept { return first_.size(); }

  /// Checked, 1-based.
  std::size_t index(int r, int s) const;
  AtomPair pair(std::size_t idx) const;

  // Unchecked 0-based access used by the matrix builders.
  std::size_t index0(int r, int s) const noexcept {
    return static_cast<std::size_t>(r) * (2 * n_atoms_ - r - 1) / 2 +
           static_cast<std::size_t>(s - r - 1);
  }
  int first0(std::size_t idx) const noexcept { return first_[idx]; }
  int second0(std::size_t idx) const noexcept { return second_[idx]; }

  /// Index of the mirror image (r, s) -> (N+1-s, N+1-r).
  std::size_t mirror(std::size_t idx) const noexcept {
    return index0(n_atoms_ - 1 - second_[idx], n_atoms_ - 1 - first_[idx]);
  }

 private:
  int n_atoms_;
  std::vector<int> first_;
  std::vector<int> second_;
};

std::size_t pair_index(int r, int s, int n_atoms);
AtomPair index_pair(std::size_t idx, int n_atoms);

}  // namespace boundpair
