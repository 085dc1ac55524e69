#include "boundpair/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boundpair/spectra.hpp"

namespace boundpair {

namespace {

constexpr cdouble kI{0.0, 1.0};

// cos and sin of K*d/2 written as (pi - delta)*d/2 so that the zone-edge
// values for integer d are exact: at K = pi, cos vanishes for odd d and sin
// for even d without rounding noise.
struct HalfAngle {
  double c;
  double s;
};

HalfAngle half_angle(double K, int d) {
  const double delta = kPi - K;
  const int q = ((d % 4) + 4) % 4;  // pi*d/2 mod 2pi in quarter turns
  const double c0 = q == 0 ? 1.0 : q == 2 ? -1.0 : 0.0;
  const double s0 = q == 1 ? 1.0 : q == 3 ? -1.0 : 0.0;
  if (delta == 0.0) return {c0, s0};
  const double a = 0.5 * delta * d;
  const double ca = std::cos(a), sa = std::sin(a);
  // (pi d/2) - a
  return {c0 * ca + s0 * sa, s0 * ca - c0 * sa};
}

// d^order/dK^order of -i g cos(K d/2) exp(i phi |d|)
cdouble coupling(double K, int d, double phi, double g, int order) {
  const HalfAngle t = half_angle(K, d);
  const double half = 0.5 * d;
  double f = 0.0;
  switch (order) {
    case 0:
      f = t.c;
      break;
    case 1:
      f = -half * t.s;
      break;
    case 2:
      f = -half * half * t.c;
      break;
    default:
      throw DomainError("relative_h_derivative: order must be 0, 1 or 2");
  }
  if (f == 0.0) return {0.0, 0.0};
  return -kI * g * f * std::exp(kI * (phi * std::abs(d)));
}

CMatrix folded_matrix(double K, int m, const ArrayParams& params, int order) {
  CMatrix h(m, m);
  for (int c = 1; c <= m; ++c)
    for (int r = c; r <= m; ++r) {
      const cdouble v = coupling(K, r - c, params.phi(), params.gamma0(), order) +
                        coupling(K, r + c, params.phi(), params.gamma0(), order);
      h(r - 1, c - 1) = v;
      h(c - 1, r - 1) = v;
    }
  return h;
}

double tail_weight(const CVector& v) {
  const Eigen::Index half = v.size() / 2;
  const double total = v.squaredNorm();
  return v.tail(v.size() - half).squaredNorm() / total;
}

double overlap(const CVector& a, const CVector& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  const double na = a.head(n).norm(), nb = b.head(n).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.head(n).dot(b.head(n))) / (na * nb);
}

struct Pick {
  cdouble energy;
  CVector vector;
  double tail = 1.0;
};

std::optional<Pick> pick_localized(double K, int m, const ArrayParams& params, const BoundSearch& search,
                                   const CVector* reference, double target) {
  const auto pairs = eigensolve(folded_matrix(K, m, params, 0));
  std::optional<Pick> best;
  double best_score = 0.0;
  for (const auto& p : pairs) {
    const double tail = tail_weight(p.vector);
    if (!(tail < search.tail_tol)) continue;
    // Larger score wins.
    const double score = reference ? overlap(*reference, p.vector) : -std::abs(p.value - target);
    if (!best || score > best_score) {
      best = Pick{p.value, p.vector, tail};
      best_score = score;
    }
  }
  return best;
}

double reduce_wavevector(double K) {
  double k = std::fmod(K, 2.0 * kPi);
  if (k < 0) k += 2.0 * kPi;
  if (k > kPi) k = 2.0 * kPi - k;
  return k;
}

}  // namespace

RelativeH build_relative_h(double K, int truncation, const ArrayParams& params, Folding folding) {
  if (truncation < 10) throw DomainError("relative problem needs truncation >= 10");
  RelativeH out;
  out.K = K;
  out.truncation = truncation;
  out.folding = folding;
  if (folding == Folding::folded) {
    out.coords.resize(static_cast<std::size_t>(truncation));
    std::iota(out.coords.begin(), out.coords.end(), 1);
    out.matrix = folded_matrix(K, truncation, params, 0);
    return out;
  }
  for (int r = -truncation; r <= truncation; ++r)
    if (r != 0) out.coords.push_back(r);
  const auto n = static_cast<Eigen::Index>(out.coords.size());
  out.matrix.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) {
      const cdouble v = coupling(K, out.coords[r] - out.coords[c], params.phi(), params.gamma0(), 0);
      out.matrix(r, c) = v;
      out.matrix(c, r) = v;
    }
  return out;
}

CMatrix relative_h_derivative(double K, int truncation, const ArrayParams& params, int order) {
  if (truncation < 10) throw DomainError("relative problem needs truncation >= 10");
  return folded_matrix(K, truncation, params, order);
}

PiAnalytics analytic_pi_states(const ArrayParams& params) {
  PiAnalytics a;
  a.kappa = params.kappa();
  a.energy = params.eps_pi();
  a.lower_edge = scattering_energy(0.0, params);
  a.upper_edge = scattering_energy(kPi, params);
  return a;
}

CVector analytic_bound_profile(const ArrayParams& params, int truncation) {
  const double c = std::cos(2.0 * params.phi());
  if (!(c > 0.0)) throw DomainError("cos(2 phi) <= 0: no exponentially bound pair");
  const double norm = std::sqrt(1.0 - c * c);
  CVector v = CVector::Zero(truncation);
  double amp = norm;
  for (int r = 1; 2 * r <= truncation; ++r) {
    v(2 * r - 1) = (r % 2 == 0 ? 1.0 : -1.0) * amp;
    amp *= c;
  }
  return v;
}

CVector analytic_scattering_profile(double q, int truncation) {
  CVector v = CVector::Zero(truncation);
  for (int r = 1; 2 * r - 1 <= truncation; ++r) v(2 * r - 2) = std::sqrt(2.0) * std::cos(q * (r + 0.5));
  return v;
}

double scattering_energy(double q, const ArrayParams& params) {
  const double sp = std::sin(params.phi()), cp = std::cos(params.phi());
  const double ch = std::cos(0.5 * q);
  return params.gamma0() * sp * cp / (sp * sp - ch * ch);
}

std::optional<BoundState> bound_state_at(double K, const ArrayParams& params, const BoundSearch& search,
                                         const CVector* reference) {
  const double target = params.eps_pi();
  int m = search.truncation;
  std::optional<Pick> pick;
  while (m <= search.max_truncation) {
    pick = pick_localized(K, m, params, search, reference, target);
    if (pick) break;
    m *= 2;
  }
  if (!pick) return std::nullopt;

  BoundState out;
  out.K = K;
  if (search.check_convergence) {
    for (;;) {
      const int m2 = 2 * m;
      if (m2 > search.max_truncation) break;
      auto finer = pick_localized(K, m2, params, search, &pick->vector, target);
      if (!finer) break;
      out.convergence = std::abs(finer->energy - pick->energy);
      pick = std::move(finer);
      m = m2;
      if (out.convergence < search.energy_tol) break;
    }
  }
  out.energy = pick->energy;
  out.profile = pick->vector;
  out.truncation = m;
  out.tail_weight = pick->tail;
  return out;
}

DispersionCurve compute_dispersion(const ArrayParams& params, const std::vector<double>& wavevectors,
                                   const BoundSearch& search) {
  DispersionCurve curve;
  curve.period12 = params.period12();
  curve.gamma0 = params.gamma0();
  std::vector<std::size_t> order(wavevectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kPi - reduce_wavevector(wavevectors[a]) < kPi - reduce_wavevector(wavevectors[b]);
  });
  auto start = bound_state_at(kPi, params, search);
  if (!start) return curve;
  CVector ref = start->profile;
  std::vector<std::optional<DispersionSample>> found(wavevectors.size());
  for (std::size_t idx : order) {
    const double k = reduce_wavevector(wavevectors[idx]);
    auto st = k == kPi ? start : bound_state_at(k, params, search, &ref);
    if (!st) break;
    ref = st->profile;
    found[idx] = DispersionSample{wavevectors[idx], st->energy.real(), st->energy.imag(), st->truncation,
                                  st->convergence};
  }
  for (auto& f : found)
    if (f) curve.samples.push_back(*f);
  return curve;
}

double inv_mass_closed_form(double phi, double gamma0) {
  const double c = std::cos(phi);
  if (c == 0.0) throw DomainError("inv_mass_closed_form: cos(phi) = 0");
  return -gamma0 * std::sin(phi) * std::cos(3.0 * phi) / (8.0 * std::pow(c, 6));
}

double kp_diagonal_closed_form(double phi, double gamma0) {
  const double c2 = std::cos(2.0 * phi), s2 = std::sin(2.0 * phi);
  return 4.0 * gamma0 * c2 * (2.0 - c2 * c2) / (s2 * s2 * s2);
}

KpMass inv_mass_kp(const ArrayParams& params, int truncation) {
  if (truncation < 10) throw DomainError("relative problem needs truncation >= 10");
  const PiAnalytics pi = analytic_pi_states(params);
  if (!(pi.lower_edge < pi.energy && pi.energy < pi.upper_edge))
    throw DomainError("bound energy is not inside the scattering gap at K = pi");

  const int m = truncation;
  const CMatrix h = folded_matrix(kPi, m, params, 0);
  const CMatrix h1 = folded_matrix(kPi, m, params, 1);
  const CMatrix h2 = folded_matrix(kPi, m, params, 2);

  // Folded site r sits at row r-1: even r on odd rows.
  std::vector<Eigen::Index> even, odd;
  for (Eigen::Index i = 0; i < m; ++i) ((i + 1) % 2 == 0 ? even : odd).push_back(i);
  auto sub = [&](const std::vector<Eigen::Index>& idx) {
    CMatrix b(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
      for (std::size_t r = 0; r < idx.size(); ++r) b(r, c) = h(idx[r], idx[c]);
    return b;
  };
  auto embed = [&](const std::vector<Eigen::Index>& idx, const CVector& x) {
    CVector v = CVector::Zero(m);
    for (std::size_t i = 0; i < idx.size(); ++i) v(idx[i]) = x(static_cast<Eigen::Index>(i));
    return v;
  };
  auto c_normalize = [](CVector v) {
    const cdouble n2 = v.transpose() * v;
    if (std::abs(n2) < 1e-12) throw SolverError("k.p: quasi-null eigenvector, c-norm vanishes");
    return CVector(v / std::sqrt(n2));
  };

  const auto even_pairs = eigensolve(sub(even));
  std::size_t bound_idx = 0;
  for (std::size_t i = 1; i < even_pairs.size(); ++i)
    if (std::abs(even_pairs[i].value - pi.energy) < std::abs(even_pairs[bound_idx].value - pi.energy)) bound_idx = i;
  const cdouble eps0 = even_pairs[bound_idx].value;
  const CVector v0 = c_normalize(embed(even, even_pairs[bound_idx].vector));

  KpMass out;
  out.truncation = m;
  out.eps_pi = eps0.real();
  out.diagonal_closed = kp_diagonal_closed_form(params.phi(), params.gamma0());
  out.diagonal_sum = v0.transpose() * h2 * v0;

  const CVector x = h1 * v0;
  for (std::size_t i = 0; i < even_pairs.size(); ++i) {
    if (i == bound_idx) continue;
    const CVector vn = embed(even, even_pairs[i].vector);
    out.max_same_parity_element = std::max(out.max_same_parity_element, std::abs(vn.dot(x)));
  }

  cdouble second{0.0, 0.0};
  for (const auto& p : eigensolve(sub(odd))) {
    const cdouble denom = eps0 - p.value;
    if (std::abs(denom) < 1e-6 * params.gamma0()) {
      ++out.guarded_terms;
      continue;
    }
    const CVector vn = c_normalize(embed(odd, p.vector));
    const cdouble elem = vn.transpose() * x;
    second += 2.0 * elem * elem / denom;
  }
  out.second_order = second;
  out.inv_mass = (out.diagonal_sum + out.second_order).real();
  return out;
}

FdMass inv_mass_fd(const ArrayParams& params, const std::vector<double>& steps, int truncation) {
  if (steps.size() < 2) throw DomainError("inv_mass_fd: need at least two steps");
  BoundSearch search;
  search.truncation = truncation;
  search.check_convergence = false;
  const auto centre = bound_state_at(kPi, params, search);
  if (!centre) throw SolverError("inv_mass_fd: no bound state at K = pi");
  FdMass out;
  out.steps = steps;
  CVector ref = centre->profile;
  for (double h : steps) {
    const auto st = bound_state_at(kPi - h, params, search, &ref);
    if (!st) throw SolverError("inv_mass_fd: bound branch lost at K = pi - " + std::to_string(h));
    out.raw.push_back(2.0 * (st->energy.real() - centre->energy.real()) / (h * h));
  }
  // Richardson table for an even error expansion in h.
  std::vector<std::vector<double>> table(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    table[i].push_back(out.raw[i]);
    for (std::size_t j = 1; j <= i; ++j) {
      const double ratio = std::pow(steps[i - j] / steps[i], 2.0 * static_cast<double>(j));
      table[i].push_back(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (ratio - 1.0));
    }
    out.extrapolated.push_back(table[i].back());
  }
  const std::size_t last = steps.size() - 1;
  out.inv_mass = table[last][last];
  out.error_estimate = std::abs(table[last][last] - table[last][last - 1]);
  if (!std::isfinite(out.inv_mass) || out.error_estimate > 1e-3 * params.gamma0())
    throw SolverError("inv_mass_fd: Richardson extrapolation did not settle (estimate " +
                      std::to_string(out.error_estimate) + ")");
  return out;
}

MassReport mass_report(const ArrayParams& params, int kp_truncation, int fd_truncation) {
  MassReport r;
  r.period12 = params.period12();
  r.inv_mass_closed = inv_mass_closed_form(params.phi(), params.gamma0());
  r.kp = inv_mass_kp(params, kp_truncation);
  r.fd = inv_mass_fd(params, {0.2, 0.1, 0.05}, fd_truncation);
  return r;
}

}  // namespace boundpair
