#include "steerkit/robustness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>

namespace steerkit {

namespace {

constexpr double slack = 1e-9;

InequalityCheck make_check(std::string name, int i, int k, double value, double bound, bool lower) {
  InequalityCheck c;
  c.name = std::move(name);
  c.i = i;
  c.k = k;
  c.value = value;
  c.bound = bound;
  c.lower = lower;
  c.margin = lower ? value - bound : bound - value;
  c.pass = c.margin >= -slack;
  return c;
}

// (1 (x) (M (+) 1)) applied to phi+ embedded in C^d (x) C^D.
Ket reference_target(const CMatrix& m, int big_d) {
  const int d = static_cast<int>(m.rows());
  CMatrix embedded = CMatrix::Identity(big_d, big_d);
  embedded.topLeftCorner(d, d) = m;
  return apply_local(CMatrix::Identity(d, d), embedded, maximally_entangled(d, big_d));
}

CMatrix direct_sum_identity(const CMatrix& m, int extra) {
  const Eigen::Index n = m.rows();
  CMatrix out = CMatrix::Identity(n + extra, n + extra);
  out.topLeftCorner(n, n) = m;
  return out;
}

double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw std::invalid_argument("grid: bad " + what + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

RobustnessBounds analytic_bounds(int d, double epsilon) {
  if (d < 2) throw std::invalid_argument("analytic_bounds: d must be at least 2");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("analytic_bounds: epsilon must be a nonnegative number");
  const double root_d = std::sqrt(static_cast<double>(d));
  const double s = std::sqrt(2.0 * epsilon);
  RobustnessBounds b;
  b.d = d;
  b.epsilon = epsilon;
  b.state_bound = s + 2.0 * root_d * std::sqrt(s);
  b.observable_bound = root_d * s * (1.0 + 4.0 * root_d * s);
  return b;
}

void NoiseSpec::validate() const {
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2.0))
    throw std::invalid_argument("noise: theta must lie in [0, pi/2)");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("noise: delta must be >= 0");
}

ZBasisDecomposition decompose_state_zbasis(const Ket& psi, int d) {
  const CMatrix coeffs = coefficient_matrix(psi, d);
  ZBasisDecomposition out;
  out.d = d;
  out.alphas.resize(d);
  for (int i = 0; i < d; ++i) {
    const double alpha = coeffs.row(i).norm();
    out.alphas(i) = alpha;
    if (alpha > 1e-12)
      out.conditional.emplace_back(Ket(coeffs.row(i).transpose() / alpha));
    else
      out.conditional.emplace_back(std::nullopt);
  }
  return out;
}

AlignmentError::AlignmentError(std::vector<int> indices)
    : std::domain_error([&] {
        std::string msg = "alignment unitary undefined: ||v_j|| below 1e-9 for j =";
        for (int j : indices) msg += " " + std::to_string(j);
        return msg;
      }()),
      indices_(std::move(indices)) {}

CMatrix alignment_unitary(const QuditObservable& b2, const ZBasisDecomposition& decomp) {
  const int d = decomp.d;
  const int big_d = b2.dim();
  if (b2.outcomes() != d) throw std::invalid_argument("alignment_unitary: outcome count differs from d");
  if (static_cast<int>(decomp.conditional.size()) != d)
    throw std::invalid_argument("alignment_unitary: malformed decomposition");

  CMatrix domain(big_d, d);
  std::vector<int> bad;
  for (int j = 0; j < d; ++j) {
    const auto& b = decomp.conditional[static_cast<std::size_t>(j)];
    if (!b || b->size() != big_d) {
      if (b && b->size() != big_d) throw std::invalid_argument("alignment_unitary: Bob dimension mismatch");
      bad.push_back(j);
      continue;
    }
    const Ket v = b2.projector((d - j) % d) * *b;
    const double norm = v.norm();
    if (norm < 1e-9) {
      bad.push_back(j);
      continue;
    }
    domain.col(j) = v / norm;
  }
  if (!bad.empty()) throw AlignmentError(std::move(bad));

  const CMatrix domain_rest = orthonormal_completion(domain);
  const CMatrix id = CMatrix::Identity(big_d, big_d);
  return id.leftCols(d) * domain.adjoint() + id.rightCols(big_d - d) * domain_rest.adjoint();
}

std::vector<QuditObservable> theorem2_alice(int d, int l) {
  if (l < 0 || l >= d) throw std::invalid_argument("theorem2_alice: l must lie in [0, d)");
  const auto [x, z] = generalized_pauli(d);
  CMatrix a1 = x.matrix() * z.power(l);
  if ((matrix_power(a1, d) - CMatrix::Identity(d, d)).norm() > 1e-9) a1 *= omega_power(2 * d, 1);
  std::vector<QuditObservable> out;
  out.emplace_back(std::move(a1), d);
  out.push_back(z);
  return out;
}

Scenario perturb(const Scenario& ideal, const NoiseSpec& spec) {
  spec.validate();
  if (spec.theta == 0.0 && spec.delta == 0.0) return ideal;

  const int d = ideal.d();
  int big_d = ideal.bob_dim();
  std::vector<CMatrix> bob;
  for (const auto& b : ideal.bob()) bob.push_back(b.matrix());
  Ket state = ideal.state();

  if (spec.theta > 0.0) {
    SchmidtForm schmidt = schmidt_decompose(state, d);
    int rank = schmidt.rank(default_tolerances.support);
    if (rank == big_d) {
      CMatrix coeffs = CMatrix::Zero(d, big_d + d);
      coeffs.leftCols(big_d) = coefficient_matrix(state, d);
      for (auto& m : bob) m = direct_sum_identity(m, d);
      big_d += d;
      state = from_coefficient_matrix(coeffs);
      schmidt = schmidt_decompose(state, d);
      rank = schmidt.rank(default_tolerances.support);
    }
    const CMatrix junk = orthonormal_completion(schmidt.right.leftCols(rank));
    auto rng = derived_rng(spec.seed, 0);
    const CMatrix chi_coeffs = random_matrix(d, static_cast<int>(junk.cols()), rng) * junk.transpose();
    const Ket chi = from_coefficient_matrix(chi_coeffs).normalized();
    state = std::cos(spec.theta) * state + std::sin(spec.theta) * chi;
    state.normalize();
  }

  if (spec.delta > 0.0) {
    auto rng = derived_rng(spec.seed, 1);
    const CMatrix g = random_matrix(big_d, big_d, rng);
    CMatrix h = (g + g.adjoint()) / 2.0;
    h /= h.norm();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    const auto phases = (cplx(0.0, spec.delta) * solver.eigenvalues().cast<cplx>()).array().exp().matrix();
    const CMatrix v = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    for (auto& m : bob) m = v * m * v.adjoint();
  }

  std::vector<QuditObservable> untrusted;
  for (auto& m : bob) untrusted.emplace_back(std::move(m), d);
  return Scenario(ideal.alice(), std::move(untrusted), std::move(state),
                  std::max(Scenario::default_max_bob_dim, big_d));
}

RobustnessReport verify_theorem2(const Scenario& s, int l) {
  const int d = s.d();
  const auto expected = theorem2_alice(d, l);
  if (s.n_settings() != 2) throw std::invalid_argument("verify_theorem2: exactly two settings required");
  for (std::size_t i = 0; i < 2; ++i)
    if (hs_distance(s.alice()[i].matrix(), expected[i].matrix()) > 1e-12)
      throw std::invalid_argument("verify_theorem2: trusted observables are not (X_d Z_d^l, Z_d)");

  RobustnessReport r;
  r.d = d;
  r.l = l;
  r.violation = steering_value(s);
  r.epsilon = quantum_max(2, d) - r.violation;
  if (r.epsilon < -1e-9) throw std::invalid_argument("verify_theorem2: functional exceeds its quantum maximum");
  const double eps = std::max(r.epsilon, 0.0);
  r.bounds = analytic_bounds(d, eps);

  const Ket& psi = s.state();
  const int big_d = s.bob_dim();
  const CMatrix id_a = CMatrix::Identity(d, d);
  r.decomposition = decompose_state_zbasis(psi, d);
  r.ub = alignment_unitary(s.bob()[1], r.decomposition);

  const Ket aligned = apply_local(id_a, r.ub, psi);
  r.aligned_state_distance = (aligned - maximally_entangled(d, big_d)).norm();

  r.state_distances.resize(2, d);
  r.observable_distances_sq.resize(2, d);
  Eigen::MatrixXd stab(2, d);
  for (int i = 0; i < 2; ++i) {
    const auto& a = s.alice()[static_cast<std::size_t>(i)];
    const auto& b = s.bob()[static_cast<std::size_t>(i)];
    for (int k = 0; k < d; ++k) {
      const CMatrix target = a.power(k).conjugate();
      r.state_distances(i, k) =
          (apply_local(id_a, r.ub * b.power(k), psi) - reference_target(target, big_d)).norm();
      const CMatrix rotated = (r.ub * b.power(k) * r.ub.adjoint()).topLeftCorner(d, d);
      r.observable_distances_sq(i, k) = (rotated - target).squaredNorm();
      stab(i, k) = (apply_local(a.power(k), b.power(k), psi) - psi).norm();
    }
  }
  r.max_state_distance = r.state_distances.maxCoeff();
  r.max_observable_distance_sq = r.observable_distances_sq.maxCoeff();

  const double root2eps = std::sqrt(2.0 * eps);
  const double root_d = std::sqrt(static_cast<double>(d));
  const RVector& alpha = r.decomposition.alphas;

  for (int i = 0; i < 2; ++i)
    for (int k = 1; k < d; ++k) {
      const auto& a = s.alice()[static_cast<std::size_t>(i)];
      const auto& b = s.bob()[static_cast<std::size_t>(i)];
      r.checks.push_back(make_check("correlator", i, k, local_expectation(a.power(k), b.power(k), psi).real(),
                                    1.0 - eps, true));
    }
  for (int k = 0; k < d; ++k) {
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += alpha(i) * alpha((i + k) % d);
    r.checks.push_back(make_check("alpha_overlap_sum", 0, k, sum, 1.0 - eps, true));
  }
  r.checks.push_back(make_check("alpha_sum_squared", 0, 0, alpha.sum() * alpha.sum(), d * (1.0 - eps), true));
  for (int i = 0; i < d; ++i)
    r.checks.push_back(make_check("alpha_deviation", i, 0, std::abs(alpha(i) - 1.0 / root_d), root2eps, false));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      r.checks.push_back(make_check("alpha_product_deviation", i, j,
                                    std::abs(alpha(i) * alpha((i + j) % d) - 1.0 / d), root2eps, false));
  const double overlap_floor = 1.0 - 2.0 * d * root2eps;
  for (int j = 0; j < d; ++j) {
    const Ket& b = *r.decomposition.conditional[static_cast<std::size_t>(j)];
    const double weight = b.dot(s.bob()[1].projector((d - j) % d) * b).real();
    r.checks.push_back(make_check("eigenspace_weight", 0, j, weight, overlap_floor, true));
    const double overlap = (r.ub * b)(j).real();
    r.checks.push_back(make_check("aligned_overlap", 0, j, overlap, overlap_floor, true));
  }
  for (int i = 0; i < 2; ++i)
    for (int k = 1; k < d; ++k)
      r.checks.push_back(make_check("stabilizer_residual", i, k, stab(i, k), root2eps, false));
  r.checks.push_back(
      make_check("state_alignment", 0, 0, r.aligned_state_distance, 2.0 * root_d * std::sqrt(root2eps), false));
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < d; ++k) {
      InequalityCheck c = make_check("triangle_chain", i, k, r.state_distances(i, k),
                                     stab(i, k) + r.aligned_state_distance, false);
      c.pass = c.margin >= -1e-10;
      r.checks.push_back(std::move(c));
    }

  r.all_intermediate_pass =
      std::all_of(r.checks.begin(), r.checks.end(), [](const InequalityCheck& c) { return c.pass; });
  r.all_bounds_pass = r.max_state_distance <= r.bounds.state_bound + slack &&
                      r.max_observable_distance_sq <= r.bounds.observable_bound + slack;
  return r;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) return {parse_double(text, "value")};
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
    throw std::invalid_argument("grid: expected start:step:count, got '" + text + "'");
  const std::string_view view(text);
  const double start = parse_double(view.substr(0, first), "start");
  const double step = parse_double(view.substr(first + 1, second - first - 1), "step");
  const std::string_view count_text = view.substr(second + 1);
  int count = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (count_text.empty() || ec != std::errc() || ptr != count_text.data() + count_text.size() || count < 1)
    throw std::invalid_argument("grid: count must be a positive integer, got '" + std::string(count_text) + "'");
  if (step == 0.0 && count > 1) throw std::invalid_argument("grid: zero step with more than one point");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(start + i * step);
  return out;
}

std::vector<SweepRow> run_sweep(int d, int l, std::span<const double> thetas, std::span<const double> deltas,
                                std::uint64_t seed) {
  const auto alice = theorem2_alice(d, l);
  const Scenario ideal = ideal_realization(alice);
  std::vector<SweepRow> rows;
  int index = 0;
  for (double theta : thetas)
    for (double delta : deltas) {
      SweepRow row;
      row.index = index;
      row.theta = theta;
      row.delta = delta;
      row.noise_seed = derived_rng(seed, static_cast<std::uint64_t>(index))();
      try {
        const Scenario noisy = perturb(ideal, NoiseSpec{theta, delta, row.noise_seed});
        const RobustnessReport rep = verify_theorem2(noisy, l);
        row.epsilon = rep.epsilon;
        row.state_bound = rep.bounds.state_bound;
        row.observable_bound = rep.bounds.observable_bound;
        row.max_state_distance = rep.max_state_distance;
        row.max_observable_distance_sq = rep.max_observable_distance_sq;
        row.all_intermediate_pass = rep.all_intermediate_pass;
        row.all_bounds_pass = rep.all_bounds_pass;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
      ++index;
    }
  return rows;
}

}  // namespace steerkit
