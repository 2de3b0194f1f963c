#pragma once

#include "steerkit/linalg.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace steerkit {

/// Residuals of the three defining properties of a d-outcome unitary
/// observable: unitarity, A^d = 1, spectrum inside the d-th roots of unity.
struct ValidationReport {
  double unitarity_residual = 0.0;  // ||A^dagger A - 1||_2
  double order_residual = 0.0;      // ||A^d - 1||_2
  double spectrum_residual = 0.0;   // max_j min_r |lambda_j - omega^r|
  bool ambiguous_label = false;     // some eigenvalue sits between two roots
  std::vector<int> labels;          // nearest root index per eigenvalue
  bool passes = false;
};

ValidationReport validate_observable(const CMatrix& a, int d,
                                     const Tolerances& tol = default_tolerances);

/// A d-outcome unitary observable; outcome a corresponds to eigenvalue omega^a.
/// The matrix dimension equals d on the trusted side and may exceed it on the
/// untrusted side. Construction validates and throws std::invalid_argument.
class QuditObservable {
 public:
  QuditObservable(CMatrix matrix, int outcomes, const Tolerances& tol = default_tolerances);

  int outcomes() const { return outcomes_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }

  /// A^k for any integer k (reduced mod d, so negative powers are adjoints).
  CMatrix power(int k) const;

  /// Spectral projector onto eigenvalue omega^a, (1/d) sum_k omega^{-ak} A^k.
  CMatrix projector(int a) const;

 private:
  CMatrix matrix_;
  int outcomes_;
  std::vector<CMatrix> powers_;
};

/// Outcome relabeling f on {0, ..., d-1}.
class OutcomePermutation {
 public:
  explicit OutcomePermutation(std::vector<int> image);

  static OutcomePermutation identity(int d);
  static OutcomePermutation reversal(int d);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& image() const { return image_; }

 private:
  std::vector<int> image_;
};

bool is_prime(int n);

/// (X_d, Z_d): X|i> = |i+1 mod d>, Z|i> = omega^i |i>.
std::pair<QuditObservable, QuditObservable> generalized_pauli(int d);

/// The literal matrix omega^{k(k+1)} X_d Z_d^k, without validation.
CMatrix mub_matrix(int d, int k);

/// The MUB observable omega^{k(k+1)} X_d Z_d^k for prime d. Throws
/// std::domain_error when the phase convention does not produce an order-d
/// observable (d = 2, k = 1).
QuditObservable mub_observable(int d, int k);

/// Columns f_j = d^{-1/2} sum_m omega^{jm} |m>.
CMatrix fourier_basis(int d);

/// sum_i omega^{f(i)} |s_i><s_i| from orthonormal columns s_i.
QuditObservable observable_from_basis(const CMatrix& basis, const OutcomePermutation& perm,
                                      const Tolerances& tol = default_tolerances);

/// Entrywise complex conjugate in the computational basis.
QuditObservable conjugate_observable(const QuditObservable& a);

/// Named d = 4 examples: "weaker_d4_pair" (Z_4 and the block observable built
/// from |+-_0>, |+-_1>) and "triple_d4" (three observables that are jointly but
/// not pairwise genuinely incompatible).
std::vector<QuditObservable> builtin_example(std::string_view name);

}  // namespace steerkit
