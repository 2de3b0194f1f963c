#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace steerkit {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Matrix<cplx>;
using Ket = Vector<cplx>;
using RVector = Vector<double>;

/// Numerical thresholds shared by every module. Pass one record explicitly
/// rather than sprinkling literals.
struct Tolerances {
  double equality = 1e-9;         // matrix/vector equality checks
  double orthonormality = 1e-10;  // bases and state normalization
  double rank = 1e-8;             // relative singular-value cut for null spaces
  double spectrum = 1e-8;         // eigenvalue distance to a root of unity
  double support = 1e-7;          // Schmidt coefficients below this are zero
};

inline const Tolerances default_tolerances{};

/// e^{2 pi i j / d}, with j reduced mod d first so large powers stay exact.
inline cplx omega_power(int d, long long j) {
  long long r = j % d;
  if (r < 0) r += d;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
  return std::polar(1.0, angle);
}

inline cplx omega(int d) { return omega_power(d, 1); }

/// Kronecker product a (x) b. Index convention: (i*b.rows() + k, j*b.cols() + l).
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> tensor_product(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.template cast<Scalar>();
  return out;
}

template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.norm();
}

/// Hilbert-Schmidt distance sqrt(Tr[(a-b)^dagger (a-b)]).
template <typename DerivedA, typename DerivedB>
double hs_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("hs_distance: dimension mismatch");
  return (a - b).norm();
}

/// a^k by repeated squaring; a^0 is the identity.
template <typename Derived>
Matrix<typename Derived::Scalar> matrix_power(const Eigen::MatrixBase<Derived>& a, int k) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_power: matrix is not square");
  if (k < 0) throw std::invalid_argument("matrix_power: negative exponent");
  Matrix<Scalar> result = Matrix<Scalar>::Identity(a.rows(), a.cols());
  Matrix<Scalar> base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

/// Schmidt decomposition psi = sum_i lambda_i |e_i>|f_i> of a state on C^d (x) C^D.
///
/// `coefficients` has min(d, D) entries sorted descending (trailing zeros kept).
/// `left` holds d orthonormal columns, `right` holds min(d, D) orthonormal
/// columns; column i of each pairs with coefficient i (left columns beyond the
/// coefficient count complete the basis of C^d). Within a block of equal
/// coefficients the basis choice is arbitrary.
struct SchmidtForm {
  int dim_left = 0;
  int dim_right = 0;
  RVector coefficients;
  CMatrix left;
  CMatrix right;

  int rank(double threshold) const;
};

/// Reshape psi on C^d (x) C^D into the d x D coefficient matrix Psi with
/// psi = sum_{ij} Psi_ij |i>|j>.
CMatrix coefficient_matrix(const Ket& psi, int d);
Ket from_coefficient_matrix(const CMatrix& coeffs);

SchmidtForm schmidt_decompose(const Ket& psi, int d, const Tolerances& tol = default_tolerances);
Ket reconstruct(const SchmidtForm& form);

/// |phi_d^+> = d^{-1/2} sum_i |ii>, optionally with Bob's factor embedded in C^D.
Ket maximally_entangled(int d, int bob_dim = 0);

/// (a (x) b)|psi> computed as a Psi b^T without forming the Kronecker product.
Ket apply_local(const CMatrix& a, const CMatrix& b, const Ket& psi);

/// <psi| a (x) b |psi>.
cplx local_expectation(const CMatrix& a, const CMatrix& b, const Ket& psi);

bool is_normalized(const Ket& psi, const Tolerances& tol = default_tolerances);
bool has_orthonormal_columns(const CMatrix& basis, double threshold);

/// Extend the orthonormal columns of `basis` (n x r) to a full basis of C^n by
/// Gram-Schmidt over the computational vectors |0>,...,|n-1> in index order.
/// Returns only the n - r added columns.
CMatrix orthonormal_completion(const CMatrix& basis);

/// Numerical rank: singular values above max(rel * sigma_max, floor) count.
int numerical_rank(const CMatrix& a, double rel, double floor = 0.0);

/// Orthonormal basis (columns) of the null space of a, same rank rule.
CMatrix null_space(const CMatrix& a, double rel, double floor = 0.0);

// Seeded random objects. Distributions are drawn from std::mt19937_64 so a
// fixed seed reproduces bit-identical values on one toolchain.
Ket random_ket(int dim, std::mt19937_64& rng);
CMatrix random_unitary(int dim, std::mt19937_64& rng);
CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng);

/// Deterministic per-item generator derived from (seed, index).
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace steerkit
