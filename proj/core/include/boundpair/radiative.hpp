#pragma once

// Radiative escape of finite-array two-photon states through the array edges.

#include <optional>
#include <vector>

#include "boundpair/spectra.hpp"

namespace boundpair {

struct EmissionAmplitudes {
  CVector d;           // d_r = sum_s psi_rs exp(i phi s)
  double decay = 0.0;  // gamma0 sum_r |d_r|^2
};

/// Exact decomposition -Im eps = gamma0 sum_r |d_r|^2 for a state normalized
/// with sum_{r,s} |psi_rs|^2 = 1.
EmissionAmplitudes emission_amplitudes(const CMatrix& psi, const ArrayParams& params);

struct StencilAmplitudes {
  int first_site = 2;              // 1-based atom of d2[0]
  std::vector<double> d2;          // |d_j|^2 for j = 2..N-1
  double decay_estimate = 0.0;     // gamma0 * sum d2
};

/// |d_j|^2 = |chi_{j+1,1} + chi_{j-1,1} - 2 cos(phi) chi_{j,1}|^2 / (4 gamma0^4 sin^2 phi)
/// for the bulk atoms j = 2..N-1, i.e. the emission amplitudes expressed
/// through the first column of chi only. The two end atoms are left out, so
/// the summed rate is an approximation that improves with N. Needs N >= 4.
StencilAmplitudes edge_amplitudes_from_chi(const ChiState& chi, const ArrayParams& params);

/// Dead-layer thickness 3.5/kappa in lattice sites.
double dead_layer(double kappa);

/// chi_rr, r = 1..N.
CVector diagonal_profile(const ChiState& chi);

/// Pearson correlation of |chi_rr| with sin(pi r / N) over the bulk window
/// [2 l_dead, N - 2 l_dead].
double standing_wave_correlation(const CVector& chi_diag, double l_dead);

struct EdgeProfile {
  CVector d;
  CVector chi_diag;
  double l_dead = 0.0;
  double kappa_tilde = 0.0;
  double barrier = 0.0;   // U in units of gamma0
  double max_d2 = 0.0;
  int argmax_site = 0;    // 1-based, left half of the array
};

/// Emission amplitudes, diagonal cross-section and dead layer of a state.
EdgeProfile edge_profile(const TwoPhotonState& state, const ArrayParams& params);

struct TunnelingFit {
  double barrier = 0.0;      // U = kappa_tilde^2 |1/m| / 2
  double kappa_tilde = 0.0;  // +inf at the magic period
  double an_score = 0.0;     // l_dead^2 exp(-2 kappa_tilde / kappa)
  int fit_points = 0;
  double slope = 0.0;        // fitted d ln|d_j| / dj on the rising edge
};

/// Fits the under-barrier exponent kappa_tilde from the rise of ln|d_j|
/// over j in [2, round(2 l_dead)] and converts it to a barrier height with
/// kappa_tilde = sqrt(2 |m| U). If `barrier` is supplied, the asymptotic score
/// uses the model exponent sqrt(2 |m| U) for that U instead of the fitted
/// slope. With 1/m = 0 the exponent is +inf and the score is exactly 0.
TunnelingFit tunneling_fit(const EdgeProfile& profile, double inv_mass, const ArrayParams& params,
                           std::optional<double> barrier = std::nullopt);

/// l_dead^2 exp(-2 kappa_tilde / kappa).
double an_score(double l_dead, double kappa_tilde, double kappa);

}  // namespace boundpair
