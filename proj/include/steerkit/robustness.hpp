#pragma once

#include "steerkit/steering.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace steerkit {

struct RobustnessBounds {
  int d = 0;
  double epsilon = 0.0;
  double state_bound = 0.0;       // sqrt(2 eps) + 2 sqrt(d) (2 eps)^{1/4}
  double observable_bound = 0.0;  // sqrt(d) sqrt(2 eps) (1 + 4 sqrt(d) sqrt(2 eps))
};

/// Throws std::invalid_argument for d < 2 or negative (or non-finite) epsilon.
RobustnessBounds analytic_bounds(int d, double epsilon);

/// theta: rotation of the state toward a junk direction orthogonal to Bob's
/// support. delta: Bob's observables are conjugated by exp(delta G) with G a
/// seeded anti-Hermitian generator of unit HS norm.
struct NoiseSpec {
  double theta = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless theta in [0, pi/2) and delta >= 0.
  void validate() const;
};

/// psi = sum_i alpha_i |i> (x) |b_i>, alpha_i >= 0. conditional[i] is empty
/// when alpha_i vanishes.
struct ZBasisDecomposition {
  int d = 0;
  RVector alphas;
  std::vector<std::optional<Ket>> conditional;
};

ZBasisDecomposition decompose_state_zbasis(const Ket& psi, int d);

class AlignmentError : public std::domain_error {
 public:
  explicit AlignmentError(std::vector<int> indices);
  const std::vector<int>& indices() const { return indices_; }

 private:
  std::vector<int> indices_;
};

/// Unitary on C^D with U_B |v_j / ||v_j||> = |j>, v_j = P_{-j} |b_j>, where
/// P_a is the spectral projector of b2 for omega^a. The orthocomplement is
/// mapped onto |d>, ..., |D-1> by Gram-Schmidt over computational vectors.
/// Throws AlignmentError listing every j with ||v_j|| < 1e-9 (or b_j undefined).
CMatrix alignment_unitary(const QuditObservable& b2, const ZBasisDecomposition& decomp);

/// (X_d Z_d^l, Z_d). When (X_d Z_d^l)^d = -1 (even d, odd l) the first matrix
/// is multiplied by exp(i pi / d) so that it is a d-outcome observable.
std::vector<QuditObservable> theorem2_alice(int d, int l);

/// Noisy copy of an ideal scenario. A Bob space with no room outside the
/// state's support is first enlarged by d dimensions (Bob acts as identity
/// there); this happens only when theta > 0.
Scenario perturb(const Scenario& ideal, const NoiseSpec& spec);

struct InequalityCheck {
  std::string name;
  int i = 0;
  int k = 0;
  double value = 0.0;
  double bound = 0.0;
  bool lower = true;  // value >= bound when true, value <= bound otherwise
  double margin = 0.0;  // distance on the satisfied side (negative when violated)
  bool pass = false;
};

struct RobustnessReport {
  int d = 0;
  int l = 0;
  double violation = 0.0;
  double epsilon = 0.0;  // raw 2(d-1) - violation
  RobustnessBounds bounds;
  ZBasisDecomposition decomposition;
  CMatrix ub;
  Eigen::MatrixXd state_distances;          // (i, k), k = 0..d-1
  Eigen::MatrixXd observable_distances_sq;  // (i, k)
  double max_state_distance = 0.0;
  double max_observable_distance_sq = 0.0;
  double aligned_state_distance = 0.0;  // ||(1 (x) U_B) psi - phi+||
  std::vector<InequalityCheck> checks;
  bool all_intermediate_pass = false;
  bool all_bounds_pass = false;
};

/// Measures distances and every proof-chain inequality for s. Throws std::invalid_argument when alice is not
/// theorem2_alice(d, l) or epsilon < -1e-9; propagates AlignmentError.
RobustnessReport verify_theorem2(const Scenario& s, int l);

struct SweepRow {
  int index = 0;
  double theta = 0.0;
  double delta = 0.0;
  std::uint64_t noise_seed = 0;
  double epsilon = 0.0;
  double state_bound = 0.0;
  double observable_bound = 0.0;
  double max_state_distance = 0.0;
  double max_observable_distance_sq = 0.0;
  bool all_intermediate_pass = false;
  bool all_bounds_pass = false;
  std::string error;  // non-empty when the point could not be evaluated
};

/// Grid "start:step:count" or a single number. Throws std::invalid_argument
/// on malformed input, count < 1, or a zero step with count > 1.
std::vector<double> parse_grid(const std::string& text);

/// Theta-major, delta-minor evaluation of perturbed ideal scenarios. Point p
/// uses the noise seed derived_rng(seed, p)().
std::vector<SweepRow> run_sweep(int d, int l, std::span<const double> thetas, std::span<const double> deltas,
                                std::uint64_t seed);

}  // namespace steerkit
