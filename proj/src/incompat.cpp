#include "steerkit/incompat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace steerkit {

namespace {

int common_dimension(std::span<const QuditObservable> obs) {
  if (obs.empty()) throw std::invalid_argument("empty observable set");
  const int d = obs.front().dim();
  for (const auto& a : obs)
    if (a.dim() != d)
      throw std::invalid_argument("observable dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                  std::to_string(d));
  return d;
}

// Hermitian matrix whose eigenprojectors split C^d into invariant blocks.
// Coefficients come from a fixed seed so the result is reproducible.
CMatrix generic_hermitian(const CommutantBasis& comm) {
  const int d = comm.d;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const cplx i(0.0, 1.0);
  CMatrix h = CMatrix::Zero(d, d);
  for (const auto& b : comm.basis) {
    const CMatrix re = (b + b.adjoint()) / 2.0;
    const CMatrix im = (b - b.adjoint()) / (2.0 * i);
    h += gauss(rng) * re;
    h += gauss(rng) * im;
  }
  h -= (h.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
  const double norm = h.norm();
  if (norm > 0.0) h /= norm;
  return (h + h.adjoint()) / 2.0;
}

}  // namespace

CommutantBasis commutant(std::span<const QuditObservable> obs, const Tolerances& tol) {
  const int d = common_dimension(obs);
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const CMatrix id = CMatrix::Identity(d, d);

  // vec(A P - P A) = (1 (x) A - A^T (x) 1) vec(P), column-major vec.
  CMatrix system(n * static_cast<Eigen::Index>(obs.size()), n);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const CMatrix& a = obs[i].matrix();
    system.middleRows(static_cast<Eigen::Index>(i) * n, n) =
        tensor_product(id, a) - tensor_product(a.transpose(), id);
  }
  const CMatrix kernel = null_space(system, tol.rank);

  CommutantBasis out;
  out.d = d;
  out.basis.reserve(static_cast<std::size_t>(kernel.cols()));
  for (Eigen::Index c = 0; c < kernel.cols(); ++c)
    out.basis.emplace_back(Eigen::Map<const CMatrix>(kernel.col(c).data(), d, d));
  return out;
}

bool is_genuinely_incompatible(std::span<const QuditObservable> obs, const Tolerances& tol) {
  return commutant(obs, tol).dimension() == 1;
}

std::vector<CMatrix> invariant_blocks(std::span<const QuditObservable> obs, const Tolerances& tol) {
  const CommutantBasis comm = commutant(obs, tol);
  const int d = comm.d;
  if (comm.dimension() == 1) return {CMatrix::Identity(d, d)};

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generic_hermitian(comm));
  const RVector& values = solver.eigenvalues();
  const CMatrix& vectors = solver.eigenvectors();

  // Eigenvalues are sorted ascending; split wherever the gap is resolvable.
  constexpr double gap = 1e-6;
  std::vector<CMatrix> blocks;
  Eigen::Index start = 0;
  for (Eigen::Index j = 1; j <= d; ++j) {
    if (j == d || values(j) - values(j - 1) > gap) {
      const auto cols = vectors.middleCols(start, j - start);
      blocks.push_back(cols * cols.adjoint());
      start = j;
    }
  }
  return blocks;
}

std::optional<InvariantSubspace> common_invariant_subspace(std::span<const QuditObservable> obs,
                                                           const Tolerances& tol) {
  std::vector<CMatrix> blocks = invariant_blocks(obs, tol);
  if (blocks.size() < 2) return std::nullopt;
  InvariantSubspace sub;
  sub.d = static_cast<int>(blocks.front().rows());
  sub.rank = static_cast<int>(std::lround(blocks.front().trace().real()));
  sub.projector = std::move(blocks.front());
  return sub;
}

bool shares_common_eigenvector(std::span<const QuditObservable> obs, const Tolerances& tol) {
  const int d = common_dimension(obs);

  // Depth-first search over outcome tuples; `basis` spans the running
  // intersection of eigenspaces for observables [0, index).
  std::function<bool(const CMatrix&, std::size_t)> search = [&](const CMatrix& basis, std::size_t index) {
    if (index == obs.size()) return true;
    const auto& a = obs[index];
    const CMatrix id = CMatrix::Identity(a.dim(), a.dim());
    for (int outcome = 0; outcome < a.outcomes(); ++outcome) {
      const CMatrix leak = (id - a.projector(outcome)) * basis;
      const CMatrix coeffs = null_space(leak, 0.0, tol.rank);
      if (coeffs.cols() == 0) continue;
      if (search(basis * coeffs, index + 1)) return true;
    }
    return false;
  };
  return search(CMatrix::Identity(d, d), 0);
}

bool is_mub_pair(const CMatrix& basis_a, const CMatrix& basis_b, const Tolerances& tol) {
  const Eigen::Index d = basis_a.rows();
  if (basis_a.cols() != d || basis_b.rows() != d || basis_b.cols() != d)
    throw std::invalid_argument("is_mub_pair: bases must be d x d");
  if (!has_orthonormal_columns(basis_a, tol.orthonormality) ||
      !has_orthonormal_columns(basis_b, tol.orthonormality))
    throw std::invalid_argument("is_mub_pair: input basis is not orthonormal");
  const CMatrix overlaps = basis_a.adjoint() * basis_b;
  const double target = 1.0 / static_cast<double>(d);
  return (overlaps.cwiseAbs2().array() - target).abs().maxCoeff() < tol.spectrum;
}

}  // namespace steerkit
