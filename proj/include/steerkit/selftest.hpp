#pragma once

#include "steerkit/steering.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace steerkit {

enum class Verdict { certified, partial, failed };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

/// Block structure of Bob's observables relative to the support of rho_B.
struct BobBlocks {
  CMatrix support_projector;              // Pi_B, D x D
  int support_rank = 0;
  std::vector<CMatrix> compressed;        // Pi_B B_i Pi_B, D x D
  std::vector<double> upper_residuals;    // ||Pi_B B_i (1 - Pi_B)||_2
  std::vector<double> lower_residuals;    // ||(1 - Pi_B) B_i Pi_B||_2
  std::vector<double> rest_residuals;     // ||(1 (x) (B_i - Pi_B B_i Pi_B)) psi||
  std::vector<double> unitarity_residuals;  // compressed block unitary on the support
  std::vector<double> order_residuals;    // ||(Pi_B B_i Pi_B)^d - Pi_B||_2
};

/// One common invariant block of a non-genuinely-incompatible trusted set and
/// what the statistics certify about it.
struct CertifiedBlock {
  CMatrix projector;             // d x d block projector Pi_k
  int rank = 0;
  double weight = 0.0;           // ||(Pi_k (x) 1) psi||^2
  double level = 0.0;            // lambda_k with component lambda_k sum_{j in block} |jj>
  bool certified = false;        // block carries weight
  double state_residual = 0.0;   // distance of the rotated component from lambda_k sum |jj>
  std::vector<CMatrix> observables;      // conj(Pi_k) U_B B_i U_B^dagger conj(Pi_k), d x d
  std::vector<double> observable_errors; // HS distance to conj(Pi_k) A_i^* conj(Pi_k)
};

struct PartialReport {
  int commutant_dim = 0;
  double violation = 0.0;
  double epsilon = 0.0;
  double max_stabilizer_residual = 0.0;
  int pa_rank = 0;
  std::vector<double> pa_levels;  // distinct eigenvalues of P_A (ascending)
  std::vector<double> commutation_residuals;
  std::vector<CertifiedBlock> blocks;
  Verdict verdict = Verdict::failed;
};

struct CertificationReport {
  int d = 0;
  int n_settings = 0;
  int bob_dim = 0;
  double tolerance = 0.0;
  double violation = 0.0;
  double epsilon = 0.0;
  Eigen::MatrixXd stabilizer_residuals;  // (i, k-1)
  double max_stabilizer_residual = 0.0;
  bool genuinely_incompatible = false;
  bool shares_common_eigenvector = false;
  SchmidtForm schmidt;
  int schmidt_rank = 0;
  CMatrix pa;
  double pa_identity_residual = 0.0;  // ||P_A - 1||_2
  std::vector<double> commutation_residuals;
  std::vector<double> bob_offdiagonal_residuals;
  CMatrix ub;
  std::vector<double> observable_errors;
  double state_error = 0.0;
  Verdict verdict = Verdict::failed;
  std::optional<PartialReport> partial;
};

/// r_{i,k} = ||A_i^k (x) B_i^k |psi> - |psi>||, rows i, columns k - 1.
Eigen::MatrixXd stabilizer_residuals(const Scenario& s);

/// P_A = sum_i sqrt(d) lambda_i |e_i><e_i| (missing coefficients count as zero).
CMatrix extract_PA(const SchmidtForm& schmidt);

BobBlocks bob_blocks(const Scenario& s, const Tolerances& tol = default_tolerances);

/// Unitary on C^D with U_B |f_i> = |e_i^*> for a full-rank Schmidt form, the
/// target embedded in the first d coordinates. The orthocomplement is mapped
/// deterministically (Gram-Schmidt over computational vectors, index order).
/// Throws std::domain_error when the Schmidt rank is below d.
CMatrix construct_reference_unitary(const SchmidtForm& schmidt, const Tolerances& tol = default_tolerances);

/// Same construction restricted to the first `rank` Schmidt pairs.
CMatrix reference_unitary_on_support(const SchmidtForm& schmidt, int rank);

/// Exact self-testing pipeline. Sets whose trusted observables are not
/// genuinely incompatible are demoted: the verdict comes from partial_certify
/// (or failed when they share an eigenvector).
CertificationReport certify(const Scenario& s, double tol, const Tolerances& tols = default_tolerances);

/// Subspace certification for trusted sets that are not genuinely incompatible
/// but share no eigenvector. Throws std::invalid_argument otherwise.
PartialReport partial_certify(const Scenario& s, double tol, const Tolerances& tols = default_tolerances);

}  // namespace steerkit
