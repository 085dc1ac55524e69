#pragma once

// Infinite periodic array: relative motion of a photon pair at fixed
// centre-of-mass wavevector K, the bound-pair dispersion and its effective
// mass at the zone edge.
//
// The relative coordinate is truncated to 1 <= |r| <= M. Because
// Phi_r = Phi_{-r}, the default "folded" representation keeps r = 1..M with
// couplings h(r-s) + h(r+s); the unfolded one keeps r = -M..M without 0.

#include <optional>
#include <vector>

#include "boundpair/hamiltonians.hpp"

namespace boundpair {

enum class Folding { folded, unfolded };

struct RelativeH {
  double K = 0.0;
  int truncation = 0;
  Folding folding = Folding::folded;
  std::vector<int> coords;  // relative coordinate of each row
  CMatrix matrix;
};

/// H_rs(K) = -i gamma0 cos(K (r-s)/2) exp(i phi |r-s|) on the truncated lattice.
RelativeH build_relative_h(double K, int truncation, const ArrayParams& params,
                           Folding folding = Folding::folded);

/// Analytic K-derivative (order 0, 1 or 2) of the folded matrix.
CMatrix relative_h_derivative(double K, int truncation, const ArrayParams& params, int order);

/// Closed-form states at K = pi.
struct PiAnalytics {
  double kappa = 0.0;
  double energy = 0.0;       // 2 gamma0 cot 2phi
  double lower_edge = 0.0;   // scattering energy at q = 0
  double upper_edge = 0.0;   // scattering energy at q = pi
};

/// Throws DomainError when cos 2phi <= 0.
PiAnalytics analytic_pi_states(const ArrayParams& params);

/// Bound profile at K = pi on the folded lattice r = 1..truncation:
/// Phi_{2r} = (-1)^r cos(2phi)^(r-1) sqrt(1 - cos^2(2phi)), odd sites zero.
/// Normalized to sum_{r>=1} Phi_r^2 = 1 (up to the truncated tail).
CVector analytic_bound_profile(const ArrayParams& params, int truncation);

/// Relative-motion scattering state on the odd sublattice at K = pi,
/// Phi_{2r-1} = sqrt(2) cos(q (r + 1/2)), folded r = 1..truncation. A plane
/// wave, so it carries no normalization.
CVector analytic_scattering_profile(double q, int truncation);

/// gamma0 sin(phi) cos(phi) / (sin^2 phi - cos^2(q/2)).
double scattering_energy(double q, const ArrayParams& params);

struct BoundSearch {
  int truncation = 200;
  int max_truncation = 1600;
  double tail_tol = 1e-8;     // weight beyond truncation/2
  double energy_tol = 1e-9;   // |eps(M) - eps(2M)|
  bool check_convergence = true;
};

struct BoundState {
  double K = 0.0;
  cdouble energy;           // Re is eps_K, |Im| is a truncation diagnostic
  CVector profile;          // folded, unit 2-norm
  int truncation = 0;
  double tail_weight = 0.0;
  double convergence = 0.0; // |eps(M) - eps(2M)|, 0 if not checked
};

/// Localized in-gap eigenstate of the relative problem at K. When
/// `reference` is given the candidate with the largest overlap wins,
/// otherwise the one closest to the K = pi bound energy. Returns empty if no
/// localized state exists up to max_truncation.
std::optional<BoundState> bound_state_at(double K, const ArrayParams& params, const BoundSearch& search = {},
                                         const CVector* reference = nullptr);

struct DispersionSample {
  double K = 0.0;
  double energy = 0.0;
  double imag = 0.0;
  int truncation = 0;
  double convergence = 0.0;
};

struct DispersionCurve {
  double period12 = 0.0;
  double gamma0 = 1.0;
  std::vector<DispersionSample> samples;  // ordered as requested
};

/// Bound branch at the requested wavevectors, continued from K = pi by
/// maximal overlap with the previous sample. Wavevectors are reduced with
/// eps(K) = eps(-K) = eps(2pi - K). Stops at the first K where the branch is
/// lost.
DispersionCurve compute_dispersion(const ArrayParams& params, const std::vector<double>& wavevectors,
                                   const BoundSearch& search = {});

/// 1/m = -gamma0 sin(phi) cos(3phi) / (8 cos^6 phi), lattice constant 1.
double inv_mass_closed_form(double phi, double gamma0 = 1.0);

/// <0|H''|0> at K = pi in closed form: 4 gamma0 cos2phi (2 - cos^2 2phi) / sin^3 2phi.
double kp_diagonal_closed_form(double phi, double gamma0 = 1.0);

struct KpMass {
  cdouble diagonal_sum;     // <0|H''|0> by direct summation
  double diagonal_closed = 0.0;
  cdouble second_order;     // 2 sum_n <0|H'|n>^2 / (eps_pi - eps_n)
  double inv_mass = 0.0;    // Re(diagonal_sum + second_order)
  double eps_pi = 0.0;
  int truncation = 0;
  int guarded_terms = 0;    // states skipped by the principal-value guard
  double max_same_parity_element = 0.0;  // |<0|H'|n>| for even n, should vanish
};

/// k.p effective mass at K = pi. Uses the unconjugated bilinear form with
/// c-normalized eigenvectors (v^T v = 1), the natural pairing for complex
/// symmetric matrices. Throws DomainError if eps_pi is outside the
/// scattering gap.
KpMass inv_mass_kp(const ArrayParams& params, int truncation = 400);

struct FdMass {
  double inv_mass = 0.0;
  double error_estimate = 0.0;
  std::vector<double> steps;
  std::vector<double> raw;        // 2 (eps(pi-h) - eps(pi)) / h^2 per step
  std::vector<double> extrapolated;
};

/// Second derivative of the numerical dispersion at K = pi, with Richardson
/// extrapolation over steps that halve successively.
FdMass inv_mass_fd(const ArrayParams& params, const std::vector<double>& steps = {0.2, 0.1, 0.05},
                   int truncation = 200);

struct MassReport {
  double period12 = 0.0;
  double inv_mass_closed = 0.0;
  KpMass kp;
  FdMass fd;
  double kp_deviation() const { return std::abs(kp.inv_mass - inv_mass_closed); }
  double fd_deviation() const { return std::abs(fd.inv_mass - inv_mass_closed); }
};

MassReport mass_report(const ArrayParams& params, int kp_truncation = 400, int fd_truncation = 200);

}  // namespace boundpair
