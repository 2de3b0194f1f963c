#include "steerkit/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace steerkit {

ValidationReport validate_observable(const CMatrix& a, int d, const Tolerances& tol) {
  ValidationReport report;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a.rows() != a.cols() || a.rows() == 0 || d < 2 || !a.allFinite()) {
    report.unitarity_residual = report.order_residual = report.spectrum_residual = inf;
    return report;
  }
  const Eigen::Index n = a.rows();
  report.unitarity_residual = (a.adjoint() * a - CMatrix::Identity(n, n)).norm();
  report.order_residual = (matrix_power(a, d) - CMatrix::Identity(n, n)).norm();

  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  const auto& values = solver.eigenvalues();
  report.labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    double best = inf, second = inf;
    int label = 0;
    for (int r = 0; r < d; ++r) {
      const double dist = std::abs(values(j) - omega_power(d, r));
      if (dist < best) {
        second = best;
        best = dist;
        label = r;
      } else if (dist < second) {
        second = dist;
      }
    }
    if (second - best < tol.spectrum) report.ambiguous_label = true;
    report.spectrum_residual = std::max(report.spectrum_residual, best);
    report.labels.push_back(label);
  }
  std::sort(report.labels.begin(), report.labels.end());
  report.passes = report.unitarity_residual <= tol.equality && report.order_residual <= tol.equality &&
                  report.spectrum_residual <= tol.spectrum && !report.ambiguous_label;
  return report;
}

QuditObservable::QuditObservable(CMatrix matrix, int outcomes, const Tolerances& tol)
    : matrix_(std::move(matrix)), outcomes_(outcomes) {
  const ValidationReport report = validate_observable(matrix_, outcomes_, tol);
  if (!report.passes)
    throw std::invalid_argument(
        "not a " + std::to_string(outcomes_) + "-outcome unitary observable (unitarity residual " +
        std::to_string(report.unitarity_residual) + ", order residual " +
        std::to_string(report.order_residual) + ", spectrum residual " +
        std::to_string(report.spectrum_residual) + ")");
  powers_.reserve(static_cast<std::size_t>(outcomes_));
  powers_.push_back(CMatrix::Identity(dim(), dim()));
  for (int k = 1; k < outcomes_; ++k) powers_.push_back(powers_.back() * matrix_);
}

CMatrix QuditObservable::power(int k) const {
  int r = k % outcomes_;
  if (r < 0) r += outcomes_;
  return powers_[static_cast<std::size_t>(r)];
}

CMatrix QuditObservable::projector(int a) const {
  CMatrix p = CMatrix::Zero(dim(), dim());
  for (int k = 0; k < outcomes_; ++k)
    p += omega_power(outcomes_, -static_cast<long long>(a) * k) * powers_[static_cast<std::size_t>(k)];
  return p / static_cast<double>(outcomes_);
}

OutcomePermutation::OutcomePermutation(std::vector<int> image) : image_(std::move(image)) {
  const int d = size();
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (int v : image_) {
    if (v < 0 || v >= d || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("OutcomePermutation: image is not a bijection on {0..d-1}");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

OutcomePermutation OutcomePermutation::identity(int d) {
  std::vector<int> image(static_cast<std::size_t>(d));
  std::iota(image.begin(), image.end(), 0);
  return OutcomePermutation(std::move(image));
}

OutcomePermutation OutcomePermutation::reversal(int d) {
  std::vector<int> image(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) image[static_cast<std::size_t>(i)] = d - 1 - i;
  return OutcomePermutation(std::move(image));
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

namespace {

CMatrix shift_matrix(int d) {
  CMatrix x = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) x((i + 1) % d, i) = 1.0;
  return x;
}

CMatrix clock_matrix(int d) {
  CMatrix z = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) z(i, i) = omega_power(d, i);
  return z;
}

}  // namespace

std::pair<QuditObservable, QuditObservable> generalized_pauli(int d) {
  if (d < 2) throw std::invalid_argument("generalized_pauli: d must be at least 2");
  return {QuditObservable(shift_matrix(d), d), QuditObservable(clock_matrix(d), d)};
}

CMatrix mub_matrix(int d, int k) {
  if (d < 2) throw std::invalid_argument("mub_matrix: d must be at least 2");
  if (k < 0 || k >= d) throw std::invalid_argument("mub_matrix: k must lie in [0, d-1]");
  const cplx phase = omega_power(d, static_cast<long long>(k) * (k + 1));
  return phase * shift_matrix(d) * matrix_power(clock_matrix(d), k);
}

QuditObservable mub_observable(int d, int k) {
  if (!is_prime(d)) throw std::invalid_argument("mub_observable: d = " + std::to_string(d) + " is not prime");
  CMatrix m = mub_matrix(d, k);
  if (!validate_observable(m, d).passes)
    throw std::domain_error("mub_observable: omega^{k(k+1)} X Z^k is not an order-" + std::to_string(d) +
                            " observable for d = " + std::to_string(d) + ", k = " + std::to_string(k));
  return QuditObservable(std::move(m), d);
}

CMatrix fourier_basis(int d) {
  CMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m)
    for (int j = 0; j < d; ++j) f(m, j) = norm * omega_power(d, static_cast<long long>(j) * m);
  return f;
}

QuditObservable observable_from_basis(const CMatrix& basis, const OutcomePermutation& perm,
                                      const Tolerances& tol) {
  const int d = static_cast<int>(basis.rows());
  if (basis.cols() != d) throw std::invalid_argument("observable_from_basis: basis must be square");
  if (perm.size() != d) throw std::invalid_argument("observable_from_basis: permutation size mismatch");
  if (!has_orthonormal_columns(basis, tol.orthonormality))
    throw std::invalid_argument("observable_from_basis: basis is not orthonormal");
  CMatrix a = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) a += omega_power(d, perm(i)) * basis.col(i) * basis.col(i).adjoint();
  return QuditObservable(std::move(a), d, tol);
}

QuditObservable conjugate_observable(const QuditObservable& a) {
  return QuditObservable(a.matrix().conjugate(), a.outcomes());
}

std::vector<QuditObservable> builtin_example(std::string_view name) {
  const cplx i(0.0, 1.0);
  if (name == "weaker_d4_pair") {
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix basis = CMatrix::Zero(4, 4);
    // Columns |+_0>, |-_0>, |+_1>, |-_1> with eigenvalues 1, i, -1, -i.
    basis(0, 0) = h, basis(1, 0) = h;
    basis(0, 1) = h, basis(1, 1) = -h;
    basis(2, 2) = h, basis(3, 2) = h;
    basis(2, 3) = h, basis(3, 3) = -h;
    auto a2 = observable_from_basis(basis, OutcomePermutation({0, 1, 2, 3}));
    return {generalized_pauli(4).second, std::move(a2)};
  }
  if (name == "triple_d4") {
    CMatrix a1(4, 4), a2(4, 4), a3(4, 4);
    a1 << 1.0 + i, 1.0 - i, 0, 0,
          1.0 - i, 1.0 + i, 0, 0,
          0, 0, -2.0, 0,
          0, 0, 0, -2.0 * i;
    a2 << 2.0, 0, 0, 0,
          0, -1.0 + i, 1.0 + i, 0,
          0, 1.0 + i, -1.0 + i, 0,
          0, 0, 0, -2.0 * i;
    a3 << 2.0, 0, 0, 0,
          0, 2.0 * i, 0, 0,
          0, 0, -1.0 - i, i - 1.0,
          0, 0, i - 1.0, -1.0 - i;
    return {QuditObservable(a1 / 2.0, 4), QuditObservable(a2 / 2.0, 4), QuditObservable(a3 / 2.0, 4)};
  }
  throw std::invalid_argument("builtin_example: unknown name '" + std::string(name) + "'");
}

}  // namespace steerkit
