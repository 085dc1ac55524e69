#pragma once

// Dense complex eigendecomposition and finite-array two-photon spectra.

#include <functional>
#include <optional>
#include <vector>

#include "boundpair/hamiltonians.hpp"

namespace boundpair {

struct EigenPair {
  cdouble value;
  CVector vector;  // unit 2-norm
};

/// All eigenpairs of a general complex square matrix (LAPACK zgeev:
/// Hessenberg reduction followed by shifted QR). Throws SolverError if QR
/// fails to converge.
std::vector<EigenPair> eigensolve(const CMatrix& a);

/// Eigenvalues only; considerably cheaper than eigensolve for large matrices.
std::vector<cdouble> eigenvalues(const CMatrix& a);

/// Finite-array eigenstate. psi is symmetric with zero diagonal and
/// sum_{r,s} |psi_rs|^2 = 1 (both orderings counted).
struct TwoPhotonState {
  ComplexEnergy energy;
  CMatrix psi;
  double residual = 0.0;  // max-norm of the matrix-form residual
};

/// Maps a pair-basis vector to psi_rs = psi_sr = v_(r,s)/sqrt(2), rescaled to
/// unit norm. Throws DomainError on a zero vector.
CMatrix reshape_and_normalize(const CVector& v, const PairBasis& basis);

/// Max-norm of H0 Psi + Psi H0 - 2 diag[diag(H0 Psi)] - 2 eps Psi.
double state_residual(const CMatrix& h0, const CMatrix& psi, ComplexEnergy energy);

enum class StateKind { bound, scattering, edge_localized };

const char* to_string(StateKind kind);

struct Classification {
  StateKind kind = StateKind::scattering;
  double near_weight = 0.0;  // weight within |r - s| <= window
  double com_spread = 0.0;   // 5%..95% quantile width of the centre of mass
  int window = 0;
};

/// Bound pairs keep most of their weight near the diagonal, |r - s| <=
/// ceil(6/kappa), and spread their centre of mass over more than N/4 sites.
/// Near-diagonal states confined to a short stretch are edge-localized.
Classification classify_bound(const CMatrix& psi, double kappa);

/// Reflection r -> N+1-r commutes with the two-photon Hamiltonian, so the
/// pair basis splits into mirror-even and mirror-odd sectors with orthonormal
/// real basis vectors (|p> +/- |Pp>)/sqrt(2).
class MirrorSectors {
 public:
  explicit MirrorSectors(const PairBasis& basis);

  std::size_t size(int sector) const { return members_[sector].size(); }

  /// Sector block of the two-photon Hamiltonian (complex symmetric).
  CMatrix block(const CMatrix& h0, int sector) const;

  /// Embeds a sector vector back into the full pair basis.
  CVector expand(const CVector& x, int sector) const;

 private:
  struct Member {
    std::size_t index;
    std::size_t partner;
    double weight;  // 1/sqrt(2), or 1 for self-mirror pairs
  };
  const PairBasis* basis_;
  std::vector<Member> members_[2];
};

struct SpectrumEntry {
  TwoPhotonState state;
  Classification cls;
};

/// Complete finite-array spectrum sorted by |Im eps| then Re eps.
struct SpectrumReport {
  std::vector<SpectrumEntry> entries;
  double max_residual = 0.0;
};

struct SpectrumOptions {
  bool use_mirror_symmetry = true;
  bool compute_residuals = true;
};

/// Every eigenstate of the N-atom array. Holds N^2 (N-1)/2 amplitudes per
/// state, so keep N moderate; use most_subradiant_bound for large arrays.
SpectrumReport solve_spectrum(const ArrayParams& params, const SpectrumOptions& options = {});

/// Streams eigenpairs (eps, pair-basis vector) sector by sector without
/// retaining the whole spectrum.
void for_each_eigenpair(const ArrayParams& params, bool use_mirror_symmetry,
                        const std::function<void(cdouble eps, const CVector& v)>& visit);

struct BoundSearchResult {
  std::optional<TwoPhotonState> state;
  Classification cls;
  std::size_t rank = 0;       // position in the |Im eps| ordering of all states
  std::size_t candidates = 0; // near-diagonal candidates examined
};

/// Longest-lived state classified as bound; empty if none exists.
BoundSearchResult most_subradiant_bound(const ArrayParams& params);

/// Orders states by |Im eps| ascending, ties by Re eps.
bool subradiant_order(cdouble a, cdouble b);

}  // namespace boundpair
