#pragma once

// Parameter sweeps over the array period or the atom count, and the
// analyses tying finite-array lifetimes to the infinite-lattice dispersion.

#include <optional>
#include <string>
#include <vector>

#include "boundpair/bloch.hpp"
#include "boundpair/cache.hpp"
#include "boundpair/signal.hpp"

namespace boundpair {

struct ScanPoint {
  double axis = 0.0;
  bool ok = false;  // false: no bound state at this point
  ComplexEnergy energy;
  double decay = 0.0;  // |Im eps| / gamma0
  StateKind kind = StateKind::scattering;
  double near_weight = 0.0;
  double residual = 0.0;
  std::size_t rank = 0;
};

struct ScanResult {
  std::string axis_name;  // "period12" or "n_atoms"
  std::vector<ScanPoint> points;
  std::string grid_hash;
};

struct ScanOptions {
  const StateCache* cache = nullptr;
  int threads = 1;
  double gamma0 = 1.0;
};

/// Most subradiant bound state for each period (in units of lambda0/12).
ScanResult period_scan(int n_atoms, const std::vector<double>& periods12, const ScanOptions& options = {});

/// Most subradiant bound state for each atom count at a fixed period.
ScanResult size_scan(double period12, const std::vector<int>& sizes, const ScanOptions& options = {});

/// Axis value with the smallest decay among the ok points.
std::optional<double> argmin_decay(const ScanResult& scan);

struct OscillationReport {
  bool detected = false;
  double wavevector = 0.0;   // dominant oscillation wavevector, rad per atom
  double width = 0.0;        // peak FWHM, used as the uncertainty
  double peak_height = 0.0;
  double noise_floor = 0.0;  // median spectral amplitude
  double amplitude = 0.0;    // std of the detrended log-decay
  std::vector<double> axis;
  std::vector<double> detrended;
  signal::Spectrum spectrum;
};

/// Oscillation of ln(decay) with N: subtract a 10-point moving average,
/// apply a cosine taper, zero-pad 8x and pick the strongest peak above the
/// detrending cutoff. Needs at least 40 ok points.
OscillationReport oscillation_wavevector(const ScanResult& scan);

/// Same analysis on raw (N, decay) series.
OscillationReport oscillation_wavevector(const std::vector<double>& sizes, const std::vector<double>& decay);

struct QuarticFit {
  double alpha = 0.0;     // -c4
  double inv_mass = 0.0;  // 2 c2
  double c2 = 0.0;
  double c4 = 0.0;
  double condition = 0.0;
  double rms_residual = 0.0;
  std::optional<double> degeneracy;  // sqrt(-c2/c4) when c2 c4 < 0
};

/// eps_K - eps_pi ~ c2 (K-pi)^2 + c4 (K-pi)^4 over samples with |K - pi| <= window.
QuarticFit quartic_fit(const DispersionCurve& curve, double window = 0.15 * kPi);

struct Degeneracy {
  bool found = false;
  double delta_k = 0.0;               // eps(pi - dK) = eps(pi)
  std::optional<double> quartic_prediction;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Nonzero dK with eps(pi - dK) = eps(pi): bracketed on the sampled curve,
/// then refined by bisection on the relative problem. `found` is false for a
/// curve that is monotonic away from pi.
Degeneracy degeneracy_wavevector(const DispersionCurve& curve, const ArrayParams& params,
                                 const BoundSearch& search = {});

/// Dispersion samples K = pi - j*step, j = 0..count-1.
DispersionCurve zone_edge_dispersion(const ArrayParams& params, double step = 0.01 * kPi, int count = 51,
                                     const BoundSearch& search = {});

struct FourierSpectrum {
  std::vector<double> wavevector;  // [0, pi]
  std::vector<double> power;       // |F(K)|^2 + |F(-K)|^2
  std::vector<signal::Peak> peaks; // sorted by height
};

/// Fourier transform of the Blackman-Harris-tapered near-diagonal slice psi_{r, r+offset}
/// along r, folded onto [0, pi]. Throws IndexError if offset is not in [1, N-1].
FourierSpectrum wavefunction_fourier(const CMatrix& psi, int offset = 2, int pad = 16);

}  // namespace boundpair
