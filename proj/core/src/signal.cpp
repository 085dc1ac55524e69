#include "boundpair/signal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace boundpair::signal {

std::vector<double> moving_average(const std::vector<double>& x, int window) {
  if (window < 1) throw DomainError("moving_average: window must be positive");
  const int n = static_cast<int>(x.size());
  const int before = window / 2;
  const int after = window - before - 1;
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - before), hi = std::min(n - 1, i + after);
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += x[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = s / (hi - lo + 1);
  }
  return out;
}

std::vector<double> cosine_taper(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(x);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i)
    out[i] *= 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
  return out;
}

Spectrum padded_spectrum(const std::vector<double>& x, int pad) {
  if (pad < 1) throw DomainError("padded_spectrum: pad must be >= 1");
  const std::size_t len = x.size() * static_cast<std::size_t>(pad);
  Spectrum s;
  if (x.empty()) return s;
  for (std::size_t m = 0; m <= len / 2; ++m) {
    const double k = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(len);
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::polar(1.0, -k * static_cast<double>(i));
    s.wavevector.push_back(k);
    s.amplitude.push_back(std::abs(acc));
  }
  return s;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<Peak> peaks;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || y[i] > y[i - 1];
    const bool right = i + 1 == n || y[i] >= y[i + 1];
    if (!(left && right) || (i == 0 && n > 1 && y[0] == y[1])) continue;
    Peak p{x[i], y[i], 0.0};
    const double half = 0.5 * y[i];
    std::size_t a = i, b = i;
    while (a > 0 && y[a] > half) --a;
    while (b + 1 < n && y[b] > half) ++b;
    p.width = x[b] - x[a];
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("spearman: need two equal-length samples");
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = mean(ra), mb = mean(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EvenQuartic fit_even_quartic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_even_quartic: need at least two points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x2 = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    a(i, 0) = x2;
    a(i, 1) = x2 * x2;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto sv = svd.singularValues();
  EvenQuartic out;
  out.condition = sv(1) > 0.0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
  if (!(out.condition < 1e12)) throw DomainError("fit_even_quartic: ill-conditioned design matrix");
  const Eigen::VectorXd c = svd.solve(b);
  out.c2 = c(0);
  out.c4 = c(1);
  out.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
  return out;
}

int count_local_extrema(const std::vector<double>& y) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if ((y[i] > y[i - 1] && y[i] > y[i + 1]) || (y[i] < y[i - 1] && y[i] < y[i + 1])) ++count;
  return count;
}

}  // namespace boundpair::signal
