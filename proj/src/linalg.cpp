#include "steerkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace steerkit {

int SchmidtForm::rank(double threshold) const {
  return static_cast<int>((coefficients.array() > threshold).count());
}

CMatrix coefficient_matrix(const Ket& psi, int d) {
  if (d < 1 || psi.size() % d != 0)
    throw std::invalid_argument("state dimension " + std::to_string(psi.size()) +
                                " is not divisible by d = " + std::to_string(d));
  const Eigen::Index bob = psi.size() / d;
  CMatrix coeffs(d, bob);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < bob; ++j) coeffs(i, j) = psi(i * bob + j);
  return coeffs;
}

Ket from_coefficient_matrix(const CMatrix& coeffs) {
  Ket psi(coeffs.size());
  const Eigen::Index bob = coeffs.cols();
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i)
    for (Eigen::Index j = 0; j < bob; ++j) psi(i * bob + j) = coeffs(i, j);
  return psi;
}

bool is_normalized(const Ket& psi, const Tolerances& tol) {
  return std::abs(psi.norm() - 1.0) <= tol.orthonormality;
}

SchmidtForm schmidt_decompose(const Ket& psi, int d, const Tolerances& tol) {
  const CMatrix coeffs = coefficient_matrix(psi, d);
  if (!is_normalized(psi, tol))
    throw std::invalid_argument("schmidt_decompose: state is not normalized (norm " +
                                std::to_string(psi.norm()) + ")");

  Eigen::JacobiSVD<CMatrix> svd(coeffs, Eigen::ComputeFullU | Eigen::ComputeThinV);
  SchmidtForm form;
  form.dim_left = d;
  form.dim_right = static_cast<int>(coeffs.cols());
  form.coefficients = svd.singularValues();
  form.left = svd.matrixU();
  // Psi = U S V^dagger, so the right Schmidt vectors are the conjugated columns of V.
  form.right = svd.matrixV().conjugate();
  return form;
}

Ket reconstruct(const SchmidtForm& form) {
  CMatrix coeffs = CMatrix::Zero(form.dim_left, form.dim_right);
  for (Eigen::Index s = 0; s < form.coefficients.size(); ++s)
    coeffs += form.coefficients(s) * form.left.col(s) * form.right.col(s).transpose();
  return from_coefficient_matrix(coeffs);
}

Ket maximally_entangled(int d, int bob_dim) {
  if (bob_dim == 0) bob_dim = d;
  if (d < 1 || bob_dim < d) throw std::invalid_argument("maximally_entangled: bad dimensions");
  Ket psi = Ket::Zero(static_cast<Eigen::Index>(d) * bob_dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) psi(static_cast<Eigen::Index>(i) * bob_dim + i) = amp;
  return psi;
}

Ket apply_local(const CMatrix& a, const CMatrix& b, const Ket& psi) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() * b.rows() != psi.size())
    throw std::invalid_argument("apply_local: dimension mismatch");
  const CMatrix coeffs = coefficient_matrix(psi, static_cast<int>(a.rows()));
  return from_coefficient_matrix(a * coeffs * b.transpose());
}

cplx local_expectation(const CMatrix& a, const CMatrix& b, const Ket& psi) {
  if (a.rows() * b.rows() != psi.size())
    throw std::invalid_argument("local_expectation: dimension mismatch");
  const CMatrix coeffs = coefficient_matrix(psi, static_cast<int>(a.rows()));
  return (coeffs.adjoint() * a * coeffs * b.transpose()).trace();
}

bool has_orthonormal_columns(const CMatrix& basis, double threshold) {
  const CMatrix gram = basis.adjoint() * basis;
  return (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= threshold;
}

CMatrix orthonormal_completion(const CMatrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index need = n - basis.cols();
  CMatrix all(n, n);
  all.leftCols(basis.cols()) = basis;
  Eigen::Index filled = basis.cols();
  // Some unit vector always has residual^2 >= (remaining dim) / n, so this cut
  // cannot starve the loop.
  const double accept = 0.5 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index m = 0; m < n && filled < n; ++m) {
    Ket v = Ket::Unit(n, m);
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = all.leftCols(filled);
      v -= q * (q.adjoint() * v);
    }
    const double norm = v.norm();
    if (norm > accept) all.col(filled++) = v / norm;
  }
  if (filled != n) throw std::logic_error("orthonormal_completion: basis is not orthonormal");
  return all.rightCols(need);
}

namespace {

int rank_of(const RVector& s, double rel, double floor) {
  if (s.size() == 0) return 0;
  const double cut = std::max(rel * s(0), floor);
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > cut).count());
}

}  // namespace

int numerical_rank(const CMatrix& a, double rel, double floor) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return rank_of(svd.singularValues(), rel, floor);
}

CMatrix null_space(const CMatrix& a, double rel, double floor) {
  if (a.rows() == 0) return CMatrix::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const int rank = rank_of(svd.singularValues(), rel, floor);
  return svd.matrixV().rightCols(a.cols() - rank);
}

CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

Ket random_ket(int dim, std::mt19937_64& rng) {
  Ket v = random_matrix(dim, 1, rng).col(0);
  return v / v.norm();
}

CMatrix random_unitary(int dim, std::mt19937_64& rng) {
  const CMatrix g = random_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace steerkit
