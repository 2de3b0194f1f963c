#include "steerkit/selftest.hpp"

#include "steerkit/incompat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace steerkit {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::partial: return "partial";
    case Verdict::failed: return "failed";
  }
  return "failed";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "certified") return Verdict::certified;
  if (s == "partial") return Verdict::partial;
  if (s == "failed") return Verdict::failed;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

Eigen::MatrixXd stabilizer_residuals(const Scenario& s) {
  const int d = s.d();
  Eigen::MatrixXd r(s.n_settings(), d - 1);
  for (int i = 0; i < s.n_settings(); ++i)
    for (int k = 1; k < d; ++k) {
      const auto& a = s.alice()[static_cast<std::size_t>(i)];
      const auto& b = s.bob()[static_cast<std::size_t>(i)];
      r(i, k - 1) = (apply_local(a.power(k), b.power(k), s.state()) - s.state()).norm();
    }
  return r;
}

CMatrix extract_PA(const SchmidtForm& schmidt) {
  const int d = schmidt.dim_left;
  const double scale = std::sqrt(static_cast<double>(d));
  CMatrix pa = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < schmidt.coefficients.size(); ++i)
    pa += scale * schmidt.coefficients(i) * schmidt.left.col(i) * schmidt.left.col(i).adjoint();
  return pa;
}

BobBlocks bob_blocks(const Scenario& s, const Tolerances& tol) {
  const SchmidtForm schmidt = schmidt_decompose(s.state(), s.d(), tol);
  const int rank = schmidt.rank(tol.support);
  const int big_d = s.bob_dim();
  const CMatrix support = schmidt.right.leftCols(rank);
  const CMatrix id = CMatrix::Identity(big_d, big_d);

  BobBlocks out;
  out.support_rank = rank;
  out.support_projector = support * support.adjoint();
  const CMatrix& pi = out.support_projector;
  for (const auto& b : s.bob()) {
    const CMatrix& m = b.matrix();
    CMatrix compressed = pi * m * pi;
    out.upper_residuals.push_back((pi * m * (id - pi)).norm());
    out.lower_residuals.push_back(((id - pi) * m * pi).norm());
    out.rest_residuals.push_back(
        apply_local(CMatrix::Identity(s.d(), s.d()), m - compressed, s.state()).norm());
    const CMatrix local = support.adjoint() * m * support;
    out.unitarity_residuals.push_back((local.adjoint() * local - CMatrix::Identity(rank, rank)).norm());
    out.order_residuals.push_back((matrix_power(compressed, s.d()) - pi).norm());
    out.compressed.push_back(std::move(compressed));
  }
  return out;
}

CMatrix reference_unitary_on_support(const SchmidtForm& schmidt, int rank) {
  const int d = schmidt.dim_left;
  const int big_d = schmidt.dim_right;
  if (rank < 1 || rank > schmidt.coefficients.size())
    throw std::invalid_argument("reference_unitary_on_support: bad rank");
  const CMatrix domain = schmidt.right.leftCols(rank);
  CMatrix target = CMatrix::Zero(big_d, rank);
  target.topRows(d) = schmidt.left.leftCols(rank).conjugate();
  const CMatrix domain_rest = orthonormal_completion(domain);
  const CMatrix target_rest = orthonormal_completion(target);
  return target * domain.adjoint() + target_rest * domain_rest.adjoint();
}

CMatrix construct_reference_unitary(const SchmidtForm& schmidt, const Tolerances& tol) {
  const int rank = schmidt.rank(tol.support);
  if (rank < schmidt.dim_left)
    throw std::domain_error("construct_reference_unitary: Schmidt rank " + std::to_string(rank) + " below d = " +
                            std::to_string(schmidt.dim_left) + " (partial regime)");
  return reference_unitary_on_support(schmidt, rank);
}

namespace {

std::vector<double> commutation_residuals(const Scenario& s, const CMatrix& pa) {
  std::vector<double> out;
  for (const auto& a : s.alice()) out.push_back((a.matrix() * pa - pa * a.matrix()).norm());
  return out;
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::vector<double> distinct_levels(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  const RVector& values = solver.eigenvalues();
  std::vector<double> levels;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (levels.empty() || values(j) - levels.back() > 1e-6)
      levels.push_back(values(j));
  }
  return levels;
}

// Upper-left d x d block of U B U^dagger.
CMatrix rotated_compression(const CMatrix& ub, const CMatrix& b, int d) {
  return (ub * b * ub.adjoint()).topLeftCorner(d, d);
}

}  // namespace

PartialReport partial_certify(const Scenario& s, double tol, const Tolerances& tols) {
  if (!(tol > 0.0)) throw std::invalid_argument("partial_certify: tolerance must be positive");
  const auto& alice = s.alice();
  if (is_genuinely_incompatible(alice, tols))
    throw std::invalid_argument("partial_certify: trusted observables are genuinely incompatible; use certify");
  if (shares_common_eigenvector(alice, tols))
    throw std::invalid_argument("partial_certify: trusted observables share an eigenvector; nothing to certify");

  const int d = s.d();
  const int n = s.n_settings();
  PartialReport out;
  out.commutant_dim = commutant(alice, tols).dimension();
  out.violation = steering_value(s);
  out.epsilon = quantum_max(n, d) - out.violation;
  out.max_stabilizer_residual = stabilizer_residuals(s).maxCoeff();

  const SchmidtForm schmidt = schmidt_decompose(s.state(), d, tols);
  const int rank = schmidt.rank(tols.support);
  const CMatrix pa = extract_PA(schmidt);
  out.pa_rank = rank;
  out.pa_levels = distinct_levels(pa);
  out.commutation_residuals = commutation_residuals(s, pa);

  const CMatrix ub = reference_unitary_on_support(schmidt, rank);
  const Ket rotated = apply_local(CMatrix::Identity(d, d), ub, s.state());
  const Ket reference = maximally_entangled(d, s.bob_dim());
  const double root_d = std::sqrt(static_cast<double>(d));

  bool all_ok = out.epsilon < tol * quantum_max(n, d) && out.max_stabilizer_residual < tol &&
                max_of(out.commutation_residuals) < tol;
  bool any_certified = false;
  for (CMatrix& proj : invariant_blocks(alice, tols)) {
    CertifiedBlock block;
    block.rank = static_cast<int>(std::lround(proj.trace().real()));
    const CMatrix bob_id = CMatrix::Identity(s.bob_dim(), s.bob_dim());
    const Ket component = apply_local(proj, bob_id, rotated);
    block.weight = component.squaredNorm();
    block.level = std::sqrt(block.weight / block.rank);
    block.certified = block.level > tols.support;
    block.state_residual =
        (component - block.level * root_d * apply_local(proj, bob_id, reference)).norm();
    if (block.certified) {
      any_certified = true;
      const CMatrix conj_proj = proj.conjugate();
      for (std::size_t i = 0; i < alice.size(); ++i) {
        CMatrix observed = conj_proj * rotated_compression(ub, s.bob()[i].matrix(), d) * conj_proj;
        const CMatrix target = conj_proj * alice[i].matrix().conjugate() * conj_proj;
        block.observable_errors.push_back(hs_distance(observed, target));
        block.observables.push_back(std::move(observed));
      }
      all_ok = all_ok && block.state_residual < tol && max_of(block.observable_errors) < tol;
    }
    block.projector = std::move(proj);
    out.blocks.push_back(std::move(block));
  }
  out.verdict = (all_ok && any_certified) ? Verdict::partial : Verdict::failed;
  return out;
}

CertificationReport certify(const Scenario& s, double tol, const Tolerances& tols) {
  if (!(tol > 0.0)) throw std::invalid_argument("certify: tolerance must be positive");
  const int d = s.d();
  const int n = s.n_settings();
  const auto& alice = s.alice();

  CertificationReport r;
  r.d = d;
  r.n_settings = n;
  r.bob_dim = s.bob_dim();
  r.tolerance = tol;
  r.violation = steering_value(s);
  r.epsilon = quantum_max(n, d) - r.violation;
  r.stabilizer_residuals = stabilizer_residuals(s);
  r.max_stabilizer_residual = r.stabilizer_residuals.maxCoeff();
  r.genuinely_incompatible = is_genuinely_incompatible(alice, tols);
  r.shares_common_eigenvector = !r.genuinely_incompatible && shares_common_eigenvector(alice, tols);

  r.schmidt = schmidt_decompose(s.state(), d, tols);
  r.schmidt_rank = r.schmidt.rank(tols.support);
  r.pa = extract_PA(r.schmidt);
  r.pa_identity_residual = (r.pa - CMatrix::Identity(d, d)).norm();
  r.commutation_residuals = commutation_residuals(s, r.pa);

  const BobBlocks blocks = bob_blocks(s, tols);
  for (std::size_t i = 0; i < blocks.compressed.size(); ++i)
    r.bob_offdiagonal_residuals.push_back(std::max(blocks.upper_residuals[i], blocks.lower_residuals[i]));

  r.ub = reference_unitary_on_support(r.schmidt, r.schmidt_rank);
  for (std::size_t i = 0; i < alice.size(); ++i) {
    const CMatrix observed = rotated_compression(r.ub, blocks.compressed[i], d);
    r.observable_errors.push_back(hs_distance(observed, alice[i].matrix().conjugate()));
  }
  r.state_error =
      (apply_local(CMatrix::Identity(d, d), r.ub, s.state()) - maximally_entangled(d, s.bob_dim())).norm();

  if (!r.genuinely_incompatible) {
    if (!r.shares_common_eigenvector) {
      r.partial = partial_certify(s, tol, tols);
      r.verdict = r.partial->verdict;
    } else {
      r.verdict = Verdict::failed;
    }
    return r;
  }

  const bool ok = r.epsilon < tol * quantum_max(n, d) && r.max_stabilizer_residual < tol && r.schmidt_rank == d &&
                  max_of(r.commutation_residuals) < tol && r.pa_identity_residual < tol &&
                  max_of(r.bob_offdiagonal_residuals) < tol && max_of(r.observable_errors) < tol &&
                  r.state_error < tol;
  r.verdict = ok ? Verdict::certified : Verdict::failed;
  return r;
}

}  // namespace steerkit
