#pragma once

#include "steerkit/observables.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace steerkit {

/// One steering experiment: N trusted observables on C^d (Alice), N untrusted
/// observables on C^D (Bob, d <= D <= max_bob_dim), and a shared pure state on
/// C^d (x) C^D.
class Scenario {
 public:
  static constexpr int default_max_bob_dim = 64;

  Scenario(std::vector<QuditObservable> alice, std::vector<QuditObservable> bob, Ket state,
           int max_bob_dim = default_max_bob_dim, const Tolerances& tol = default_tolerances);

  int d() const { return d_; }
  int n_settings() const { return static_cast<int>(alice_.size()); }
  int bob_dim() const { return bob_dim_; }
  const std::vector<QuditObservable>& alice() const { return alice_; }
  const std::vector<QuditObservable>& bob() const { return bob_; }
  const Ket& state() const { return state_; }

 private:
  std::vector<QuditObservable> alice_;
  std::vector<QuditObservable> bob_;
  Ket state_;
  int d_ = 0;
  int bob_dim_ = 0;
};

/// p(a, b | x, y) for x in [0, n_alice), y in [0, n_bob), a, b in [0, d).
class ProbTable {
 public:
  ProbTable(int n_alice, int n_bob, int d);

  int n_alice() const { return n_alice_; }
  int n_bob() const { return n_bob_; }
  int d() const { return d_; }

  double& at(int x, int y, int a, int b) { return values_[index(x, y, a, b)]; }
  double at(int x, int y, int a, int b) const { return values_[index(x, y, a, b)]; }

  /// Throws std::domain_error unless entries are >= -tol and every (x, y)
  /// block sums to one within tol.equality.
  void validate(const Tolerances& tol = default_tolerances) const;

 private:
  std::size_t index(int x, int y, int a, int b) const;

  int n_alice_, n_bob_, d_;
  std::vector<double> values_;
};

/// Generalized correlators <A_{k|x} B_{l|y}> = sum_{a,b} omega^{ak+bl} p(a,b|x,y).
class CorrelatorTable {
 public:
  CorrelatorTable(int n_alice, int n_bob, int d);

  int n_alice() const { return n_alice_; }
  int n_bob() const { return n_bob_; }
  int d() const { return d_; }

  cplx& at(int x, int y, int k, int l) { return values_[index(x, y, k, l)]; }
  cplx at(int x, int y, int k, int l) const { return values_[index(x, y, k, l)]; }

 private:
  std::size_t index(int x, int y, int k, int l) const;

  int n_alice_, n_bob_, d_;
  std::vector<cplx> values_;
};

/// Local hidden state model: hidden index lambda with weight p(lambda), state
/// rho_lambda on C^d and response distributions p(b | y, lambda).
struct LhsModel {
  std::vector<double> weights;
  std::vector<CMatrix> states;
  /// responses[lambda](y, b) = p(b | y, lambda).
  std::vector<Eigen::MatrixXd> responses;

  /// Throws std::invalid_argument if the model is not a valid LHS model for
  /// n settings with d outcomes.
  void validate(int d, int n, const Tolerances& tol = default_tolerances) const;
};

/// Born-rule table from the spectral projectors of every observable.
ProbTable prob_table(const Scenario& s);

CorrelatorTable correlators_from_probs(const ProbTable& p, int d);

/// Inverse transform p = d^{-2} sum_{k,l} omega^{-ak-bl} c. Throws
/// std::domain_error if the result is complex or not a valid probability table.
ProbTable probs_from_correlators(const CorrelatorTable& c, int d, const Tolerances& tol = default_tolerances);

/// sum_i sum_{k=1}^{d-1} <psi| A_i^k (x) B_i^k |psi>.
double steering_value(const Scenario& s);

/// Same functional restricted to the listed powers k (each in [1, d-1]).
double steering_value_restricted(const Scenario& s, std::span<const int> powers);

/// The functional from diagonal probability blocks:
/// sum_x [d P(a + b = 0 mod d | x, x) - 1].
double steering_value_from_probs(const ProbTable& p, int d);

/// N (d - 1).
double quantum_max(int n, int d);

/// |phi_d^+> with Bob measuring the complex conjugates of Alice's observables.
Scenario ideal_realization(std::span<const QuditObservable> alice);

/// g(rho) = sum_i sum_{k=1}^{d-1} |Tr(A_i^k rho)|, for pure or mixed states.
double classical_objective(std::span<const QuditObservable> alice, const Ket& psi);
double classical_objective(std::span<const QuditObservable> alice, const CMatrix& rho);

struct BoundEstimate {
  double best = 0.0;
  Ket best_state;
  std::vector<double> restart_values;
  std::vector<int> iterations;
  std::vector<bool> converged;

  int converged_count() const;
};

struct AscentOptions {
  int max_iterations = 20000;
  double gain_tolerance = 1e-12;
  double smoothing = 1e-18;  // |z| -> sqrt(|z|^2 + smoothing)
};

/// Multi-start projected gradient ascent of g over unit vectors of C^d from
/// Haar-random starts. Restart r draws its start from derived_rng(seed, r), so
/// the result does not depend on evaluation order. The value is a lower
/// estimate of max_rho g(rho), which upper-bounds the LHS value.
BoundEstimate classical_bound_estimate(std::span<const QuditObservable> alice, int restarts, std::uint64_t seed,
                                       const AscentOptions& options = {});

/// Value of the functional on the LHS model's probability table (y = x blocks).
double lhs_value(const LhsModel& m, std::span<const QuditObservable> alice);

}  // namespace steerkit
