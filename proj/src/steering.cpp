#include "steerkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace steerkit {

Scenario::Scenario(std::vector<QuditObservable> alice, std::vector<QuditObservable> bob, Ket state,
                   int max_bob_dim, const Tolerances& tol)
    : alice_(std::move(alice)), bob_(std::move(bob)), state_(std::move(state)) {
  if (alice_.empty()) throw std::invalid_argument("Scenario: no measurement settings");
  if (alice_.size() != bob_.size())
    throw std::invalid_argument("Scenario: Alice has " + std::to_string(alice_.size()) + " settings, Bob has " +
                                std::to_string(bob_.size()));
  d_ = alice_.front().outcomes();
  for (const auto& a : alice_)
    if (a.outcomes() != d_ || a.dim() != d_)
      throw std::invalid_argument("Scenario: every trusted observable must be a d x d, d-outcome observable");
  bob_dim_ = bob_.front().dim();
  for (const auto& b : bob_)
    if (b.outcomes() != d_ || b.dim() != bob_dim_)
      throw std::invalid_argument("Scenario: untrusted observables must share dimension and outcome count d");
  if (bob_dim_ < d_ || bob_dim_ > max_bob_dim)
    throw std::invalid_argument("Scenario: Bob's dimension " + std::to_string(bob_dim_) + " outside [" +
                                std::to_string(d_) + ", " + std::to_string(max_bob_dim) + "]");
  if (state_.size() != static_cast<Eigen::Index>(d_) * bob_dim_)
    throw std::invalid_argument("Scenario: state dimension does not match d * D");
  if (!is_normalized(state_, tol)) throw std::invalid_argument("Scenario: state is not normalized");
}

ProbTable::ProbTable(int n_alice, int n_bob, int d)
    : n_alice_(n_alice), n_bob_(n_bob), d_(d),
      values_(static_cast<std::size_t>(n_alice) * n_bob * d * d, 0.0) {
  if (n_alice < 1 || n_bob < 1 || d < 2) throw std::invalid_argument("ProbTable: bad shape");
}

std::size_t ProbTable::index(int x, int y, int a, int b) const {
  return ((static_cast<std::size_t>(x) * n_bob_ + y) * d_ + a) * d_ + b;
}

void ProbTable::validate(const Tolerances& tol) const {
  for (int x = 0; x < n_alice_; ++x)
    for (int y = 0; y < n_bob_; ++y) {
      double total = 0.0;
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) {
          const double v = at(x, y, a, b);
          if (!(v >= -tol.orthonormality))
            throw std::domain_error("probability table has negative entry " + std::to_string(v) + " at (x=" +
                                    std::to_string(x) + ", y=" + std::to_string(y) + ", a=" + std::to_string(a) +
                                    ", b=" + std::to_string(b) + ")");
          total += v;
        }
      if (std::abs(total - 1.0) > tol.equality)
        throw std::domain_error("probability block (x=" + std::to_string(x) + ", y=" + std::to_string(y) +
                                ") sums to " + std::to_string(total));
    }
}

CorrelatorTable::CorrelatorTable(int n_alice, int n_bob, int d)
    : n_alice_(n_alice), n_bob_(n_bob), d_(d),
      values_(static_cast<std::size_t>(n_alice) * n_bob * d * d, cplx(0.0)) {
  if (n_alice < 1 || n_bob < 1 || d < 2) throw std::invalid_argument("CorrelatorTable: bad shape");
}

std::size_t CorrelatorTable::index(int x, int y, int k, int l) const {
  return ((static_cast<std::size_t>(x) * n_bob_ + y) * d_ + k) * d_ + l;
}

void LhsModel::validate(int d, int n, const Tolerances& tol) const {
  if (weights.empty() || weights.size() != states.size() || weights.size() != responses.size())
    throw std::invalid_argument("LhsModel: weights, states and responses must have equal nonzero length");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("LhsModel: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > tol.equality) throw std::invalid_argument("LhsModel: weights do not sum to one");
  for (const auto& rho : states) {
    if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument("LhsModel: hidden state dimension mismatch");
    if ((rho - rho.adjoint()).norm() > tol.equality) throw std::invalid_argument("LhsModel: hidden state not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > tol.equality)
      throw std::invalid_argument("LhsModel: hidden state trace differs from one");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol.orthonormality)
      throw std::invalid_argument("LhsModel: hidden state not positive semidefinite");
  }
  for (const auto& r : responses) {
    if (r.rows() != n || r.cols() != d) throw std::invalid_argument("LhsModel: response table shape mismatch");
    if (r.minCoeff() < 0.0) throw std::invalid_argument("LhsModel: negative response probability");
    if ((r.rowwise().sum().array() - 1.0).abs().maxCoeff() > tol.equality)
      throw std::invalid_argument("LhsModel: response distribution does not sum to one");
  }
}

ProbTable prob_table(const Scenario& s) {
  const int d = s.d();
  const int n = s.n_settings();
  const CMatrix psi = coefficient_matrix(s.state(), d);
  ProbTable p(n, n, d);
  for (int x = 0; x < n; ++x) {
    std::vector<CMatrix> reduced;  // Psi^dagger N_{a|x} Psi
    reduced.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) reduced.push_back(psi.adjoint() * s.alice()[static_cast<std::size_t>(x)].projector(a) * psi);
    for (int y = 0; y < n; ++y) {
      const auto& bob = s.bob()[static_cast<std::size_t>(y)];
      for (int b = 0; b < d; ++b) {
        const CMatrix proj = bob.projector(b);
        for (int a = 0; a < d; ++a)
          p.at(x, y, a, b) = reduced[static_cast<std::size_t>(a)].cwiseProduct(proj).sum().real();
      }
    }
  }
  return p;
}

CorrelatorTable correlators_from_probs(const ProbTable& p, int d) {
  if (p.d() != d) throw std::invalid_argument("correlators_from_probs: outcome count mismatch");
  CorrelatorTable c(p.n_alice(), p.n_bob(), d);
  for (int x = 0; x < p.n_alice(); ++x)
    for (int y = 0; y < p.n_bob(); ++y)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          cplx sum(0.0);
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              sum += omega_power(d, static_cast<long long>(a) * k + static_cast<long long>(b) * l) * p.at(x, y, a, b);
          c.at(x, y, k, l) = sum;
        }
  return c;
}

ProbTable probs_from_correlators(const CorrelatorTable& c, int d, const Tolerances& tol) {
  if (c.d() != d) throw std::invalid_argument("probs_from_correlators: outcome count mismatch");
  ProbTable p(c.n_alice(), c.n_bob(), d);
  const double scale = 1.0 / (static_cast<double>(d) * d);
  for (int x = 0; x < c.n_alice(); ++x)
    for (int y = 0; y < c.n_bob(); ++y)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          cplx sum(0.0);
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l)
              sum += omega_power(d, -(static_cast<long long>(a) * k + static_cast<long long>(b) * l)) * c.at(x, y, k, l);
          sum *= scale;
          if (std::abs(sum.imag()) > tol.orthonormality)
            throw std::domain_error("correlator table is unphysical: complex probability at (x=" + std::to_string(x) +
                                    ", y=" + std::to_string(y) + ")");
          p.at(x, y, a, b) = sum.real();
        }
  p.validate(tol);
  return p;
}

double steering_value_restricted(const Scenario& s, std::span<const int> powers) {
  const int d = s.d();
  cplx total(0.0);
  for (int i = 0; i < s.n_settings(); ++i) {
    const auto& a = s.alice()[static_cast<std::size_t>(i)];
    const auto& b = s.bob()[static_cast<std::size_t>(i)];
    for (int k : powers) {
      if (k < 1 || k >= d) throw std::invalid_argument("steering_value: power outside [1, d-1]");
      total += local_expectation(a.power(k), b.power(k), s.state());
    }
  }
  return total.real();
}

double steering_value(const Scenario& s) {
  std::vector<int> powers(static_cast<std::size_t>(s.d() - 1));
  for (int k = 1; k < s.d(); ++k) powers[static_cast<std::size_t>(k - 1)] = k;
  return steering_value_restricted(s, powers);
}

double steering_value_from_probs(const ProbTable& p, int d) {
  if (p.d() != d) throw std::invalid_argument("steering_value_from_probs: outcome count mismatch");
  if (p.n_bob() < p.n_alice())
    throw std::invalid_argument("steering_value_from_probs: missing diagonal blocks (y = x)");
  double value = 0.0;
  for (int x = 0; x < p.n_alice(); ++x) {
    double agree = 0.0;
    for (int a = 0; a < d; ++a) agree += p.at(x, x, a, (d - a) % d);
    value += d * agree - 1.0;
  }
  return value;
}

double quantum_max(int n, int d) {
  if (n < 1 || d < 2) throw std::invalid_argument("quantum_max: need n >= 1 and d >= 2");
  return static_cast<double>(n) * (d - 1);
}

Scenario ideal_realization(std::span<const QuditObservable> alice) {
  if (alice.empty()) throw std::invalid_argument("ideal_realization: no observables");
  std::vector<QuditObservable> trusted(alice.begin(), alice.end());
  std::vector<QuditObservable> untrusted;
  untrusted.reserve(alice.size());
  for (const auto& a : alice) untrusted.push_back(conjugate_observable(a));
  const int d = alice.front().dim();
  return Scenario(std::move(trusted), std::move(untrusted), maximally_entangled(d));
}

double classical_objective(std::span<const QuditObservable> alice, const Ket& psi) {
  double g = 0.0;
  for (const auto& a : alice)
    for (int k = 1; k < a.outcomes(); ++k) g += std::abs(psi.dot(a.power(k) * psi));
  return g;
}

double classical_objective(std::span<const QuditObservable> alice, const CMatrix& rho) {
  double g = 0.0;
  for (const auto& a : alice)
    for (int k = 1; k < a.outcomes(); ++k) g += std::abs((a.power(k) * rho).trace());
  return g;
}

int BoundEstimate::converged_count() const {
  return static_cast<int>(std::count(converged.begin(), converged.end(), true));
}

namespace {

struct SmoothObjective {
  std::vector<CMatrix> terms;
  double smoothing;

  double value(const Ket& psi) const {
    double f = 0.0;
    for (const auto& m : terms) f += std::sqrt(std::norm(psi.dot(m * psi)) + smoothing);
    return f;
  }

  // Wirtinger gradient d f / d conj(psi).
  Ket gradient(const Ket& psi) const {
    Ket g = Ket::Zero(psi.size());
    for (const auto& m : terms) {
      const Ket mpsi = m * psi;
      const cplx z = psi.dot(mpsi);
      const double s = std::sqrt(std::norm(z) + smoothing);
      g += (std::conj(z) * mpsi + z * (m.adjoint() * psi)) / (2.0 * s);
    }
    return g;
  }
};

}  // namespace

BoundEstimate classical_bound_estimate(std::span<const QuditObservable> alice, int restarts, std::uint64_t seed,
                                       const AscentOptions& options) {
  if (alice.empty()) throw std::invalid_argument("classical_bound_estimate: no observables");
  if (restarts < 1) throw std::invalid_argument("classical_bound_estimate: restarts must be >= 1");
  const int d = alice.front().dim();
  for (const auto& a : alice)
    if (a.dim() != d) throw std::invalid_argument("classical_bound_estimate: dimension mismatch");

  SmoothObjective objective{{}, options.smoothing};
  for (const auto& a : alice)
    for (int k = 1; k < a.outcomes(); ++k) objective.terms.push_back(a.power(k));

  BoundEstimate out;
  out.best = -1.0;
  for (int r = 0; r < restarts; ++r) {
    auto rng = derived_rng(seed, static_cast<std::uint64_t>(r));
    Ket psi = random_ket(d, rng);
    double f = objective.value(psi);
    double step = 1.0;
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
      Ket grad = objective.gradient(psi);
      grad -= psi * psi.dot(grad);
      if (grad.norm() < 1e-15) {
        converged = true;
        break;
      }
      Ket trial;
      double f_trial = f;
      while (step > 1e-16) {
        trial = psi + step * grad;
        trial.normalize();
        f_trial = objective.value(trial);
        if (f_trial > f) break;
        step /= 2.0;
      }
      // The first improving step can overshoot across the optimum; keep halving while that helps.
      while (f_trial > f && step > 1e-16) {
        Ket shorter = psi + 0.5 * step * grad;
        shorter.normalize();
        const double f_shorter = objective.value(shorter);
        if (f_shorter <= f_trial) break;
        trial = std::move(shorter);
        f_trial = f_shorter;
        step /= 2.0;
      }
      if (f_trial <= f) {
        converged = true;
        break;
      }
      const double gain = f_trial - f;
      psi = trial;
      f = f_trial;
      step = std::min(step * 2.0, 16.0);
      // A small gain alone can follow an overshoot; also require a flat tangent gradient.
      if (gain < options.gain_tolerance && grad.norm() < 1e-6) {
        converged = true;
        break;
      }
    }
    const double value = classical_objective(alice, psi);
    out.restart_values.push_back(value);
    out.iterations.push_back(iter);
    out.converged.push_back(converged);
    if (value > out.best) {
      out.best = value;
      out.best_state = psi;
    }
  }
  return out;
}

double lhs_value(const LhsModel& m, std::span<const QuditObservable> alice) {
  if (alice.empty()) throw std::invalid_argument("lhs_value: no observables");
  const int d = alice.front().dim();
  const int n = static_cast<int>(alice.size());
  m.validate(d, n);
  ProbTable p(n, n, d);
  for (std::size_t lambda = 0; lambda < m.weights.size(); ++lambda)
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < d; ++a) {
        const double pa = (alice[static_cast<std::size_t>(x)].projector(a) * m.states[lambda]).trace().real();
        for (int y = 0; y < n; ++y)
          for (int b = 0; b < d; ++b) p.at(x, y, a, b) += m.weights[lambda] * pa * m.responses[lambda](y, b);
      }
  return steering_value_from_probs(p, d);
}

}  // namespace steerkit
