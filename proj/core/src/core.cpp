#include "boundpair/core.hpp"

#include <cmath>
#include <sstream>

namespace boundpair {

double phi_from_period(double period_ratio) {
  if (!(period_ratio > 0.0) || !std::isfinite(period_ratio))
    throw DomainError("period ratio must be positive and finite");
  return 2.0 * kPi * period_ratio;
}

double pair_kappa(double phi) {
  const double c = std::cos(2.0 * phi);
  if (!(c > 0.0)) throw DomainError("cos(2 phi) <= 0: no exponentially bound pair");
  return -2.0 * std::log(c);
}

double pair_energy_pi(double phi, double gamma0) { return 2.0 * gamma0 / std::tan(2.0 * phi); }

ArrayParams::ArrayParams(int n_atoms, double period_ratio, double gamma0)
    : n_atoms_(n_atoms),
      period_ratio_(period_ratio),
      gamma0_(gamma0),
      phi_(phi_from_period(period_ratio)) {
  if (n_atoms < 1) throw DomainError("atom count must be positive");
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw DomainError("gamma0 must be positive");
}

ArrayParams ArrayParams::from_period12(int n_atoms, double period12, double gamma0) {
  return {n_atoms, period12 / 12.0, gamma0};
}

std::string ArrayParams::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "N=" << n_atoms_ << " 12d/lambda0=" << period12() << " gamma0=" << gamma0_;
  return os.str();
}

PairBasis::PairBasis(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 1) throw DomainError("atom count must be positive");
  const auto m = static_cast<std::size_t>(n_atoms) * static_cast<std::size_t>(n_atoms - 1) / 2;
  first_.reserve(m);
  second_.reserve(m);
  for (int r = 0; r < n_atoms; ++r)
    for (int s = r + 1; s < n_atoms; ++s) {
      first_.push_back(r);
      second_.push_back(s);
    }
}

std::size_t PairBasis::index(int r, int s) const {
  if (r < 1 || s > n_atoms_ || r >= s)
    throw IndexError("pair (" + std::to_string(r) + "," + std::to_string(s) +
                     ") is not 1 <= r < s <= " + std::to_string(n_atoms_));
  return index0(r - 1, s - 1);
}

AtomPair PairBasis::pair(std::size_t idx) const {
  if (idx >= dim()) throw IndexError("pair index " + std::to_string(idx) + " out of range");
  return {first_[idx] + 1, second_[idx] + 1};
}

std::size_t pair_index(int r, int s, int n_atoms) {
  if (n_atoms < 2 || r < 1 || s > n_atoms || r >= s)
    throw IndexError("pair (" + std::to_string(r) + "," + std::to_string(s) + ") invalid for N=" +
                     std::to_string(n_atoms));
  const auto r0 = static_cast<std::size_t>(r - 1);
  return r0 * (2 * static_cast<std::size_t>(n_atoms) - r0 - 1) / 2 + static_cast<std::size_t>(s - r - 1);
}

AtomPair index_pair(std::size_t idx, int n_atoms) {
  if (n_atoms < 2) throw IndexError("no pairs for N < 2");
  const auto n = static_cast<std::size_t>(n_atoms);
  if (idx >= n * (n - 1) / 2) throw IndexError("pair index " + std::to_string(idx) + " out of range");
  // Row r (0-based) holds N-1-r pairs.
  std::size_t r = 0;
  std::size_t start = 0;
  while (start + (n - 1 - r) <= idx) {
    start += n - 1 - r;
    ++r;
  }
  return {static_cast<int>(r) + 1, static_cast<int>(r + 1 + (idx - start)) + 1};
}

}  // namespace boundpair
