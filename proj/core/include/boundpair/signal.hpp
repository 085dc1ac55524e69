#pragma once

// Small numerical helpers for the scan analyses: detrending, zero-padded
// spectra, peak picking, rank correlation and polynomial fits.

#include <vector>

#include "boundpair/core.hpp"

namespace boundpair::signal {

/// Centred moving average with a window of `window` samples, shrunk at the
/// ends of the record.
std::vector<double> moving_average(const std::vector<double>& x, int window);

/// Hann (raised-cosine) taper applied in place of a copy.
std::vector<double> cosine_taper(const std::vector<double>& x);

struct Spectrum {
  std::vector<double> wavevector;  // rad per sample, in [0, pi]
  std::vector<double> amplitude;
};

/// |DFT| of a real record zero-padded to `pad` times its length, sampled on
/// [0, pi].
Spectrum padded_spectrum(const std::vector<double>& x, int pad);

struct Peak {
  double position = 0.0;
  double height = 0.0;
  double width = 0.0;  // full width at half maximum
};

/// Local maxima of y(x) sorted by decreasing height.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Least-squares y = c2 x^2 + c4 x^4. Returns {c2, c4}; throws DomainError
/// on an ill-conditioned design.
struct EvenQuartic {
  double c2 = 0.0;
  double c4 = 0.0;
  double condition = 0.0;
  double rms_residual = 0.0;
};
EvenQuartic fit_even_quartic(const std::vector<double>& x, const std::vector<double>& y);

/// Count of strict interior local extrema.
int count_local_extrema(const std::vector<double>& y);

}  // namespace boundpair::signal
