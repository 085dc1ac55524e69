#include "boundpair/scans.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace boundpair {

namespace {

ScanPoint to_point(double axis, const BoundSearchResult& r) {
  ScanPoint p;
  p.axis = axis;
  p.rank = r.rank;
  p.near_weight = r.cls.near_weight;
  p.kind = r.cls.kind;
  if (r.state) {
    p.ok = true;
    p.energy = r.state->energy;
    p.decay = std::abs(r.state->energy.im);
    p.residual = r.state->residual;
  }
  return p;
}

// Runs job(i) for i in [0, n) on a small worker pool; results are stored by
// index so the output order never depends on scheduling.
template <class Job>
void run_pool(std::size_t n, int threads, Job job) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, n ? n : 1);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
  }
  if (error) std::rethrow_exception(error);
}

std::string grid_hash(const std::string& kind, double fixed, const std::vector<double>& axis, double gamma0) {
  std::ostringstream os;
  os.precision(17);
  os << kind << '|' << fixed << '|' << gamma0;
  for (double a : axis) os << '|' << a;
  return content_hash(os.str());
}

void require_increasing(const std::vector<double>& axis) {
  if (axis.empty()) throw DomainError("scan grid is empty");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1])) throw DomainError("scan grid must be strictly increasing");
}

}  // namespace

ScanResult period_scan(int n_atoms, const std::vector<double>& periods12, const ScanOptions& options) {
  require_increasing(periods12);
  for (double p : periods12)
    if (p < 0.5 || p > 1.5) throw DomainError("period grid must lie within [0.5, 1.5] lambda0/12");
  ScanResult scan;
  scan.axis_name = "period12";
  scan.grid_hash = grid_hash("period", n_atoms, periods12, options.gamma0);
  scan.points.resize(periods12.size());
  run_pool(periods12.size(), options.threads, [&](std::size_t i) {
    const auto params = ArrayParams::from_period12(n_atoms, periods12[i], options.gamma0);
    scan.points[i] = to_point(periods12[i], cached_most_subradiant_bound(params, options.cache));
  });
  return scan;
}

ScanResult size_scan(double period12, const std::vector<int>& sizes, const ScanOptions& options) {
  std::vector<double> axis(sizes.begin(), sizes.end());
  require_increasing(axis);
  for (int n : sizes)
    if (n < 4 || n > 120) throw DomainError("size grid must lie within [4, 120] atoms");
  ScanResult scan;
  scan.axis_name = "n_atoms";
  scan.grid_hash = grid_hash("size", period12, axis, options.gamma0);
  scan.points.resize(sizes.size());
  // Largest arrays first keeps the pool busy until the end.
  std::vector<std::size_t> order(sizes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  run_pool(sizes.size(), options.threads, [&](std::size_t k) {
    const std::size_t i = order[k];
    const auto params = ArrayParams::from_period12(sizes[i], period12, options.gamma0);
    scan.points[i] = to_point(axis[i], cached_most_subradiant_bound(params, options.cache));
  });
  return scan;
}

std::optional<double> argmin_decay(const ScanResult& scan) {
  std::optional<double> best;
  double best_decay = 0.0;
  for (const auto& p : scan.points) {
    if (!p.ok) continue;
    if (!best || p.decay < best_decay) {
      best = p.axis;
      best_decay = p.decay;
    }
  }
  return best;
}

OscillationReport oscillation_wavevector(const std::vector<double>& sizes, const std::vector<double>& decay) {
  if (sizes.size() != decay.size()) throw DomainError("oscillation: axis and data lengths differ");
  if (sizes.size() < 40) throw DomainError("oscillation analysis needs at least 40 points");
  OscillationReport rep;
  rep.axis = sizes;
  std::vector<double> logd(decay.size());
  for (std::size_t i = 0; i < decay.size(); ++i) {
    if (!(decay[i] > 0.0)) throw DomainError("oscillation: decay rates must be positive");
    logd[i] = std::log(decay[i]);
  }
  const auto base = signal::moving_average(logd, 10);
  rep.detrended.resize(logd.size());
  for (std::size_t i = 0; i < logd.size(); ++i) rep.detrended[i] = logd[i] - base[i];
  rep.amplitude = signal::stddev(rep.detrended);
  rep.spectrum = signal::padded_spectrum(signal::cosine_taper(rep.detrended), 8);
  rep.noise_floor = signal::median(rep.spectrum.amplitude);

  // Below two record-length bins the spectrum is dominated by what the
  // moving average left of the trend.
  const double cutoff = 2.0 * 2.0 * kPi / static_cast<double>(sizes.size());
  std::vector<double> k, a;
  for (std::size_t i = 0; i < rep.spectrum.wavevector.size(); ++i)
    if (rep.spectrum.wavevector[i] >= cutoff) {
      k.push_back(rep.spectrum.wavevector[i]);
      a.push_back(rep.spectrum.amplitude[i]);
    }
  const auto peaks = signal::find_peaks(k, a);
  if (peaks.empty()) return rep;
  // Interior maxima only: a maximum at the cutoff edge is trend leakage.
  for (const auto& p : peaks) {
    if (p.position == k.front()) continue;
    rep.peak_height = p.height;
    rep.wavevector = p.position;
    rep.width = p.width;
    break;
  }
  rep.detected = rep.peak_height > 3.0 * rep.noise_floor && rep.noise_floor > 0.0;
  return rep;
}

OscillationReport oscillation_wavevector(const ScanResult& scan) {
  std::vector<double> axis, decay;
  for (const auto& p : scan.points)
    if (p.ok) {
      axis.push_back(p.axis);
      decay.push_back(p.decay);
    }
  return oscillation_wavevector(axis, decay);
}

QuarticFit quartic_fit(const DispersionCurve& curve, double window) {
  std::optional<double> eps_pi;
  for (const auto& s : curve.samples)
    if (std::abs(std::remainder(s.K - kPi, 2.0 * kPi)) < 1e-12) eps_pi = s.energy;
  if (!eps_pi) throw DomainError("quartic_fit: curve has no sample at K = pi");
  std::vector<double> x, y;
  for (const auto& s : curve.samples) {
    const double dk = std::abs(std::remainder(s.K - kPi, 2.0 * kPi));
    if (dk <= window + 1e-12) {
      x.push_back(dk);
      y.push_back(s.energy - *eps_pi);
    }
  }
  if (x.size() < 15) throw DomainError("quartic_fit: need at least 15 samples inside the window");
  const auto f = signal::fit_even_quartic(x, y);
  QuarticFit q;
  q.c2 = f.c2;
  q.c4 = f.c4;
  q.alpha = -f.c4;
  q.inv_mass = 2.0 * f.c2;
  q.condition = f.condition;
  q.rms_residual = f.rms_residual;
  if (f.c2 * f.c4 < 0.0) q.degeneracy = std::sqrt(-f.c2 / f.c4);
  return q;
}

DispersionCurve zone_edge_dispersion(const ArrayParams& params, double step, int count, const BoundSearch& search) {
  std::vector<double> ks;
  for (int j = 0; j < count; ++j) ks.push_back(kPi - j * step);
  return compute_dispersion(params, ks, search);
}

Degeneracy degeneracy_wavevector(const DispersionCurve& curve, const ArrayParams& params, const BoundSearch& search) {
  Degeneracy out;
  std::vector<std::pair<double, double>> s;  // (dK, eps - eps_pi)
  std::optional<double> eps_pi;
  for (const auto& p : curve.samples) {
    const double dk = std::abs(std::remainder(p.K - kPi, 2.0 * kPi));
    if (dk < 1e-12) eps_pi = p.energy;
    s.emplace_back(dk, p.energy);
  }
  if (!eps_pi) throw DomainError("degeneracy_wavevector: curve has no sample at K = pi");
  std::sort(s.begin(), s.end());
  for (auto& p : s) p.second -= *eps_pi;
  try {
    out.quartic_prediction = quartic_fit(curve).degeneracy;
  } catch (const DomainError&) {
  }
  // First sign change of eps - eps_pi away from pi.
  if (s.size() < 3) return out;
  const bool up = s[1].second > 0.0;
  std::size_t i = 1;
  for (; i + 1 < s.size(); ++i)
    if ((s[i + 1].second > 0.0) != up) break;
  if (i + 1 >= s.size()) return out;
  double lo = s[i].first, hi = s[i + 1].first;
  out.bracket_lo = lo;
  out.bracket_hi = hi;

  BoundSearch bs = search;
  bs.check_convergence = false;
  const auto centre = bound_state_at(kPi, params, bs);
  if (!centre) return out;
  const double e0 = centre->energy.real();
  auto ref_lo = bound_state_at(kPi - lo, params, bs);
  if (!ref_lo) return out;
  CVector ref = ref_lo->profile;
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto st = bound_state_at(kPi - mid, params, bs, &ref);
    if (!st) break;
    if ((st->energy.real() - e0 > 0.0) == up) {
      lo = mid;
      ref = st->profile;
    } else {
      hi = mid;
    }
  }
  out.found = true;
  out.delta_k = 0.5 * (lo + hi);
  return out;
}

FourierSpectrum wavefunction_fourier(const CMatrix& psi, int offset, int pad) {
  const int n = static_cast<int>(psi.rows());
  if (offset < 1 || offset >= n) throw IndexError("wavefunction_fourier: offset out of range");
  std::vector<cdouble> slice;
  for (int r = 0; r + offset < n; ++r) slice.push_back(psi(r, r + offset));
  // 4-term Blackman-Harris window. Sidelobes of the dominant K = pi peak
  // outrank the physical secondary peak with a Hann or no window.
  const double last = static_cast<double>(std::max<std::size_t>(slice.size(), 2) - 1);
  for (std::size_t r = 0; r < slice.size(); ++r) {
    const double x = 2.0 * kPi * static_cast<double>(r) / last;
    slice[r] *= 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2 * x) - 0.01168 * std::cos(3 * x);
  }
  const std::size_t len = slice.size() * static_cast<std::size_t>(std::max(pad, 1));
  FourierSpectrum out;
  for (std::size_t m = 0; m <= len / 2; ++m) {
    const double k = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(len);
    cdouble fp{0.0, 0.0}, fm{0.0, 0.0};
    for (std::size_t r = 0; r < slice.size(); ++r) {
      const double ph = k * static_cast<double>(r);
      fp += slice[r] * std::polar(1.0, -ph);
      fm += slice[r] * std::polar(1.0, ph);
    }
    out.wavevector.push_back(k);
    out.power.push_back(std::norm(fp) + std::norm(fm));
  }
  out.peaks = signal::find_peaks(out.wavevector, out.power);
  return out;
}

}  // namespace boundpair
