#include "boundpair/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace boundpair {

namespace {

std::vector<EigenPair> run_zgeev(CMatrix a, bool want_vectors) {
  if (a.rows() != a.cols()) throw DomainError("eigensolve: matrix must be square");
  if (!a.allFinite()) throw DomainError("eigensolve: non-finite matrix entries");
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<EigenPair> out;
  if (n == 0) return out;
  CVector w(n);
  CMatrix vr = want_vectors ? CMatrix(n, n) : CMatrix(1, 1);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n,
                                        w.data(), nullptr, 1, vr.data(), want_vectors ? n : 1);
  if (info > 0)
    throw SolverError("zgeev: QR iteration failed, " + std::to_string(info) + " of " + std::to_string(n) +
                      " eigenvalues unconverged");
  if (info < 0) throw SolverError("zgeev: invalid argument " + std::to_string(-info));
  out.reserve(static_cast<std::size_t>(n));
  for (lapack_int k = 0; k < n; ++k) {
    if (want_vectors) {
      CVector v = vr.col(k);
      v /= v.norm();
      out.push_back({w(k), std::move(v)});
    } else {
      out.push_back({w(k), CVector()});
    }
  }
  return out;
}

// Eigenvalues by Hessenberg reduction and QR without Schur vectors, then
// eigenvectors on demand by inverse iteration on the Hessenberg matrix
// (zhsein) mapped back with the stored reflectors (zunmhr). Much cheaper
// than zgeev with vectors when only a few states are inspected.
class SelectiveEigen {
 public:
  explicit SelectiveEigen(CMatrix a) : reflectors_(std::move(a)) {
    n_ = static_cast<lapack_int>(reflectors_.rows());
    tau_ = CVector(std::max<lapack_int>(n_ - 1, 1));
    w_ = CVector(n_);
    if (n_ == 0) return;
    lapack_int info = LAPACKE_zgehrd(LAPACK_COL_MAJOR, n_, 1, n_, reflectors_.data(), n_, tau_.data());
    if (info != 0) throw SolverError("zgehrd failed with info " + std::to_string(info));
    hess_ = CMatrix::Zero(n_, n_);
    for (lapack_int c = 0; c < n_; ++c)
      for (lapack_int r = 0; r <= std::min(c + 1, n_ - 1); ++r) hess_(r, c) = reflectors_(r, c);
    CMatrix work = hess_;
    info = LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n_, 1, n_, work.data(), n_, w_.data(), nullptr, 1);
    if (info != 0)
      throw SolverError("zhseqr: QR iteration failed, " + std::to_string(info) + " eigenvalues unconverged");
  }

  lapack_int size() const { return n_; }
  cdouble value(lapack_int k) const { return w_(k); }

  CVector vector(lapack_int k) const {
    std::vector<lapack_logical> select(static_cast<std::size_t>(n_), 0);
    select[static_cast<std::size_t>(k)] = 1;
    CVector w = w_;
    CMatrix vr(n_, 1);
    lapack_int m = 0, ifaill = 0, ifailr = 0;
    lapack_int info = LAPACKE_zhsein(LAPACK_COL_MAJOR, 'R', 'N', 'N', select.data(), n_, hess_.data(), n_,
                                     w.data(), nullptr, 1, vr.data(), n_, 1, &m, &ifaill, &ifailr);
    if (info != 0) throw SolverError("zhsein: inverse iteration failed to converge");
    info = LAPACKE_zunmhr(LAPACK_COL_MAJOR, 'L', 'N', n_, 1, 1, n_, reflectors_.data(), n_, tau_.data(),
                          vr.data(), n_);
    if (info != 0) throw SolverError("zunmhr failed with info " + std::to_string(info));
    CVector v = vr.col(0);
    return v / v.norm();
  }

 private:
  lapack_int n_ = 0;
  CMatrix reflectors_;
  CMatrix hess_;
  CVector tau_;
  CVector w_;
};

struct PairGeometry {
  std::vector<int> distance;  // s - r
  std::vector<int> com_bin;   // r + s (0-based atoms)
};

PairGeometry geometry(const PairBasis& basis) {
  PairGeometry g;
  g.distance.resize(basis.dim());
  g.com_bin.resize(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    g.distance[i] = basis.second0(i) - basis.first0(i);
    g.com_bin[i] = basis.second0(i) + basis.first0(i);
  }
  return g;
}

int window_for(double kappa) { return static_cast<int>(std::ceil(6.0 / kappa)); }

// Works on pair weights |v_p|^2; psi carries each pair twice with equal
// weight so the fractions are the same.
Classification classify_weights(const std::vector<double>& weight, const PairGeometry& geo, int n_atoms,
                                double kappa) {
  Classification c;
  c.window = window_for(kappa);
  double total = 0.0, near = 0.0;
  std::vector<double> com(static_cast<std::size_t>(2 * n_atoms), 0.0);
  for (std::size_t i = 0; i < weight.size(); ++i) {
    total += weight[i];
    if (geo.distance[i] <= c.window) near += weight[i];
    com[static_cast<std::size_t>(geo.com_bin[i])] += weight[i];
  }
  if (!(total > 0.0)) return c;
  c.near_weight = near / total;
  double acc = 0.0;
  int lo = -1, hi = -1;
  for (std::size_t b = 0; b < com.size(); ++b) {
    acc += com[b] / total;
    if (lo < 0 && acc >= 0.05) lo = static_cast<int>(b);
    if (hi < 0 && acc >= 0.95) hi = static_cast<int>(b);
  }
  if (hi < 0) hi = static_cast<int>(com.size()) - 1;
  if (lo < 0) lo = hi;
  c.com_spread = 0.5 * (hi - lo);  // bins are half-sites
  if (c.near_weight >= 0.5)
    c.kind = c.com_spread > 0.25 * n_atoms ? StateKind::bound : StateKind::edge_localized;
  else
    c.kind = StateKind::scattering;
  return c;
}

std::vector<double> pair_weights(const CVector& v) {
  std::vector<double> w(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) w[static_cast<std::size_t>(i)] = std::norm(v(i));
  return w;
}

}  // namespace

std::vector<EigenPair> eigensolve(const CMatrix& a) { return run_zgeev(a, true); }

std::vector<cdouble> eigenvalues(const CMatrix& a) {
  std::vector<cdouble> out;
  for (auto& p : run_zgeev(a, false)) out.push_back(p.value);
  return out;
}

CMatrix reshape_and_normalize(const CVector& v, const PairBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != basis.dim())
    throw DomainError("reshape: vector length does not match pair basis");
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw DomainError("reshape: zero vector");
  const int n = basis.n_atoms();
  CMatrix psi = CMatrix::Zero(n, n);
  // sum_{r,s} |psi|^2 = 2 sum_p |v_p|^2 / (2 nrm^2) = 1
  const double scale = 1.0 / (std::sqrt(2.0) * nrm);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const cdouble x = v(static_cast<Eigen::Index>(i)) * scale;
    psi(basis.first0(i), basis.second0(i)) = x;
    psi(basis.second0(i), basis.first0(i)) = x;
  }
  return psi;
}

double state_residual(const CMatrix& h0, const CMatrix& psi, ComplexEnergy energy) {
  return (apply_two_photon(h0, psi) - 2.0 * energy.value() * psi).cwiseAbs().maxCoeff();
}

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::bound:
      return "bound";
    case StateKind::scattering:
      return "scattering";
    case StateKind::edge_localized:
      return "edge";
  }
  return "?";
}

Classification classify_bound(const CMatrix& psi, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("classify_bound: kappa must be positive");
  const int n = static_cast<int>(psi.rows());
  if (n < 2) throw DomainError("classify_bound: need at least two atoms");
  const PairBasis basis(n);
  const PairGeometry geo = geometry(basis);
  std::vector<double> w(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i)
    w[i] = 0.5 * (std::norm(psi(basis.first0(i), basis.second0(i))) +
                  std::norm(psi(basis.second0(i), basis.first0(i))));
  return classify_weights(w, geo, n, kappa);
}

MirrorSectors::MirrorSectors(const PairBasis& basis) : basis_(&basis) {
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const std::size_t j = basis.mirror(i);
    if (j < i) continue;
    if (j == i) {
      members_[0].push_back({i, i, 1.0});
    } else {
      members_[0].push_back({i, j, h});
      members_[1].push_back({i, j, h});
    }
  }
}

CMatrix MirrorSectors::block(const CMatrix& h0, int sector) const {
  const auto& mem = members_[sector];
  const double sign = sector == 0 ? 1.0 : -1.0;
  const auto m = static_cast<Eigen::Index>(mem.size());
  CMatrix b(m, m);
  // <a|A|b> with |a> = w_a(|i> + sign|Pi>); A commutes with the mirror so
  // <a|A|b> = w_a w_b (1 + [i != Pi]) (A[i,j] + sign A[i,Pj]) for paired rows.
  for (Eigen::Index col = 0; col < m; ++col) {
    const auto& cb = mem[static_cast<std::size_t>(col)];
    for (Eigen::Index row = col; row < m; ++row) {
      const auto& ra = mem[static_cast<std::size_t>(row)];
      cdouble v = two_photon_element(h0, *basis_, ra.index, cb.index);
      if (cb.partner != cb.index) v += sign * two_photon_element(h0, *basis_, ra.index, cb.partner);
      const double mult = ra.partner != ra.index ? 2.0 : 1.0;
      b(row, col) = ra.weight * cb.weight * mult * v;
    }
  }
  // Symmetrize from the computed triangle: exact complex symmetry.
  for (Eigen::Index col = 0; col < m; ++col)
    for (Eigen::Index row = 0; row < col; ++row) b(row, col) = b(col, row);
  return b;
}

CVector MirrorSectors::expand(const CVector& x, int sector) const {
  const auto& mem = members_[sector];
  const double sign = sector == 0 ? 1.0 : -1.0;
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis_->dim()));
  for (std::size_t a = 0; a < mem.size(); ++a) {
    const cdouble xa = x(static_cast<Eigen::Index>(a));
    v(static_cast<Eigen::Index>(mem[a].index)) += mem[a].weight * xa;
    if (mem[a].partner != mem[a].index) v(static_cast<Eigen::Index>(mem[a].partner)) += sign * mem[a].weight * xa;
  }
  return v;
}

bool subradiant_order(cdouble a, cdouble b) {
  const double da = std::abs(a.imag()), db = std::abs(b.imag());
  if (da != db) return da < db;
  return a.real() < b.real();
}

void for_each_eigenpair(const ArrayParams& params, bool use_mirror_symmetry,
                        const std::function<void(cdouble eps, const CVector& v)>& visit) {
  if (params.n_atoms() < 2) throw DomainError("two-photon spectrum needs at least two atoms");
  const PairBasis basis(params.n_atoms());
  if (!use_mirror_symmetry) {
    for (const auto& p : eigensolve(build_two_photon_h(params, basis))) visit(0.5 * p.value, p.vector);
    return;
  }
  const CMatrix h0 = build_h0(params);
  const MirrorSectors sectors(basis);
  for (int s = 0; s < 2; ++s) {
    if (sectors.size(s) == 0) continue;
    auto pairs = eigensolve(sectors.block(h0, s));
    for (const auto& p : pairs) visit(0.5 * p.value, sectors.expand(p.vector, s));
  }
}

SpectrumReport solve_spectrum(const ArrayParams& params, const SpectrumOptions& options) {
  const PairBasis basis(params.n_atoms());
  const CMatrix h0 = build_h0(params);
  const double kappa = params.kappa();
  SpectrumReport report;
  report.entries.reserve(basis.dim());
  for_each_eigenpair(params, options.use_mirror_symmetry, [&](cdouble eps, const CVector& v) {
    SpectrumEntry e;
    e.state.energy = ComplexEnergy::from(eps);
    e.state.psi = reshape_and_normalize(v, basis);
    if (options.compute_residuals) e.state.residual = state_residual(h0, e.state.psi, e.state.energy);
    e.cls = classify_bound(e.state.psi, kappa);
    report.max_residual = std::max(report.max_residual, e.state.residual);
    report.entries.push_back(std::move(e));
  });
  std::stable_sort(report.entries.begin(), report.entries.end(), [](const auto& a, const auto& b) {
    return subradiant_order(a.state.energy.value(), b.state.energy.value());
  });
  return report;
}

BoundSearchResult most_subradiant_bound(const ArrayParams& params) {
  if (params.n_atoms() < 4) throw DomainError("most_subradiant_bound needs N >= 4");
  const PairBasis basis(params.n_atoms());
  const PairGeometry geo = geometry(basis);
  const double kappa = params.kappa();
  const CMatrix h0 = build_h0(params);
  const MirrorSectors sectors(basis);
  std::vector<SelectiveEigen> solvers;
  for (int s = 0; s < 2; ++s) solvers.emplace_back(sectors.block(h0, s));

  struct Ref {
    cdouble eps;
    int sector;
    lapack_int k;
  };
  std::vector<Ref> order;
  for (int s = 0; s < 2; ++s)
    for (lapack_int k = 0; k < solvers[static_cast<std::size_t>(s)].size(); ++k)
      order.push_back({0.5 * solvers[static_cast<std::size_t>(s)].value(k), s, k});
  std::stable_sort(order.begin(), order.end(), [](const Ref& a, const Ref& b) { return subradiant_order(a.eps, b.eps); });

  BoundSearchResult result;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& ref = order[i];
    const CVector v = sectors.expand(solvers[static_cast<std::size_t>(ref.sector)].vector(ref.k), ref.sector);
    const Classification c = classify_weights(pair_weights(v), geo, params.n_atoms(), kappa);
    if (c.near_weight >= 0.5) ++result.candidates;
    if (c.kind != StateKind::bound) continue;
    result.rank = i;
    result.cls = c;
    TwoPhotonState st;
    st.energy = ComplexEnergy::from(ref.eps);
    st.psi = reshape_and_normalize(v, basis);
    st.residual = state_residual(h0, st.psi, st.energy);
    result.state = std::move(st);
    break;
  }
  return result;
}

}  // namespace boundpair
