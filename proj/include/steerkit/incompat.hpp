#pragma once

#include "steerkit/observables.hpp"

#include <optional>
#include <span>
#include <vector>

namespace steerkit {

/// Basis of {P : [P, A_i] = 0 for all i}, orthonormal in the Hilbert-Schmidt
/// inner product. Always contains the scalars, so dimension() >= 1.
struct CommutantBasis {
  int d = 0;
  std::vector<CMatrix> basis;

  int dimension() const { return static_cast<int>(basis.size()); }
};

/// Orthogonal projector onto a proper common invariant subspace.
struct InvariantSubspace {
  int d = 0;
  CMatrix projector;
  int rank = 0;
};

CommutantBasis commutant(std::span<const QuditObservable> obs, const Tolerances& tol = default_tolerances);

/// True iff the only common invariant subspaces are {0} and C^d. For order-d
/// unitaries this is equivalent to a trivial commutant: an invariant subspace
/// of a normal family is reducing, so its projector commutes with every A_i,
/// and conversely every non-scalar commutant element has a proper spectral
/// projector.
bool is_genuinely_incompatible(std::span<const QuditObservable> obs,
                               const Tolerances& tol = default_tolerances);

/// Mutually orthogonal projectors summing to the identity whose ranges are
/// common invariant subspaces: the eigenprojectors of a generic Hermitian
/// element of the commutant. A single identity block when the set is
/// genuinely incompatible.
std::vector<CMatrix> invariant_blocks(std::span<const QuditObservable> obs,
                                      const Tolerances& tol = default_tolerances);

/// A proper common invariant subspace if one exists.
std::optional<InvariantSubspace> common_invariant_subspace(std::span<const QuditObservable> obs,
                                                           const Tolerances& tol = default_tolerances);

/// True iff some unit vector is an eigenvector of every observable. Decided by
/// intersecting eigenspace projectors, which handles degenerate spectra.
bool shares_common_eigenvector(std::span<const QuditObservable> obs,
                               const Tolerances& tol = default_tolerances);

/// |<s_i|t_j>|^2 = 1/d for every pair of columns. Throws on non-orthonormal input.
bool is_mub_pair(const CMatrix& basis_a, const CMatrix& basis_b, const Tolerances& tol = default_tolerances);

}  // namespace steerkit
