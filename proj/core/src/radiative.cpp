#include "boundpair/radiative.hpp"

#include <cmath>
#include <limits>

namespace boundpair {

namespace {
constexpr cdouble kI{0.0, 1.0};
}

EmissionAmplitudes emission_amplitudes(const CMatrix& psi, const ArrayParams& params) {
  const int n = params.n_atoms();
  if (psi.rows() != n || psi.cols() != n) throw DomainError("emission_amplitudes: dimension mismatch");
  CVector phase(n);
  for (int s = 0; s < n; ++s) phase(s) = std::exp(kI * (params.phi() * (s + 1)));
  EmissionAmplitudes out;
  out.d = psi * phase;
  out.decay = params.gamma0() * out.d.squaredNorm();
  return out;
}

StencilAmplitudes edge_amplitudes_from_chi(const ChiState& chi, const ArrayParams& params) {
  const int n = params.n_atoms();
  if (n < 4) throw DomainError("edge stencil needs N >= 4");
  if (chi.chi.rows() != n) throw DomainError("edge stencil: dimension mismatch");
  const double phi = params.phi();
  const double g = params.gamma0();
  const double sn = std::sin(phi);
  const double denom = 4.0 * g * g * g * g * sn * sn;
  StencilAmplitudes out;
  out.d2.reserve(static_cast<std::size_t>(n - 2));
  for (int j = 1; j < n - 1; ++j) {
    const cdouble st = chi.chi(j + 1, 0) + chi.chi(j - 1, 0) - 2.0 * std::cos(phi) * chi.chi(j, 0);
    out.d2.push_back(std::norm(st) / denom);
    out.decay_estimate += g * out.d2.back();
  }
  return out;
}

double dead_layer(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("dead_layer: kappa must be positive");
  return 3.5 / kappa;
}

CVector diagonal_profile(const ChiState& chi) { return chi.chi.diagonal(); }

double standing_wave_correlation(const CVector& chi_diag, double l_dead) {
  const int n = static_cast<int>(chi_diag.size());
  const int lo = static_cast<int>(std::ceil(2.0 * l_dead));
  const int hi = n + 1 - lo;
  std::vector<double> a, b;
  for (int r = std::max(lo, 1); r <= std::min(hi, n); ++r) {
    a.push_back(std::abs(chi_diag(r - 1)));
    b.push_back(std::sin(kPi * r / n));
  }
  if (a.size() < 3) return 0.0;
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EdgeProfile edge_profile(const TwoPhotonState& state, const ArrayParams& params) {
  EdgeProfile p;
  p.d = emission_amplitudes(state.psi, params).d;
  p.chi_diag = diagonal_profile(to_chi(state.psi, state.energy, params));
  p.l_dead = dead_layer(params.kappa());
  const int half = (params.n_atoms() + 1) / 2;
  for (int r = 1; r <= half; ++r) {
    const double v = std::norm(p.d(r - 1));
    if (v > p.max_d2) {
      p.max_d2 = v;
      p.argmax_site = r;
    }
  }
  return p;
}

double an_score(double l_dead, double kappa_tilde, double kappa) {
  if (std::isinf(kappa_tilde)) return 0.0;
  return l_dead * l_dead * std::exp(-2.0 * kappa_tilde / kappa);
}

TunnelingFit tunneling_fit(const EdgeProfile& profile, double inv_mass, const ArrayParams& params,
                           std::optional<double> barrier) {
  const int first = 2;
  const int last = static_cast<int>(std::lround(2.0 * profile.l_dead));
  const int n = static_cast<int>(profile.d.size());
  TunnelingFit fit;
  std::vector<double> x, y;
  for (int j = first; j <= std::min(last, n); ++j) {
    const double a = std::abs(profile.d(j - 1));
    if (a > 0.0) {
      x.push_back(j);
      y.push_back(std::log(a));
    }
  }
  fit.fit_points = static_cast<int>(x.size());
  if (x.size() < 3) throw DomainError("tunneling_fit: fewer than 3 points in the rising-edge window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  fit.slope = sxy / sxx;

  const double kappa = params.kappa();
  const double abs_inv_mass = std::abs(inv_mass);
  if (abs_inv_mass == 0.0) {
    fit.kappa_tilde = std::numeric_limits<double>::infinity();
    fit.barrier = barrier.value_or(std::numeric_limits<double>::quiet_NaN());
    fit.an_score = 0.0;
    return fit;
  }
  fit.kappa_tilde = fit.slope;
  fit.barrier = 0.5 * fit.slope * fit.slope * abs_inv_mass;
  const double exponent = barrier ? std::sqrt(2.0 * *barrier / abs_inv_mass) : fit.kappa_tilde;
  fit.an_score = an_score(profile.l_dead, exponent, kappa);
  return fit;
}

}  // namespace boundpair
