#include "steerkit/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>

namespace steerkit {

namespace {

// JSON has no infinities; they are written as null and read back as +inf.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw std::invalid_argument("expected a number");
  return j.get<double>();
}

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("expected a number or an [re, im] pair");
}

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::vector<double> numbers_from(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from(x));
  return out;
}

json matrices(const std::vector<CMatrix>& v) {
  json out = json::array();
  for (const auto& m : v) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<CMatrix> matrices_from(const json& j) {
  std::vector<CMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

json real_vector(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

RVector real_vector_from(const json& j) {
  const std::vector<double> values = numbers_from(j);
  return Eigen::Map<const RVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix must be an array of rows");
  if (j.empty()) return CMatrix(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw std::invalid_argument("matrix row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from(j[r][c]);
  }
  return m;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd real_matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix must be an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw std::invalid_argument("matrix row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number_from(j[r][c]);
  }
  return m;
}

json ket_to_json(const Ket& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Ket ket_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("amplitudes must be an array");
  Ket v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

json to_json(const SchmidtForm& s) {
  return {{"dim_left", s.dim_left},
          {"dim_right", s.dim_right},
          {"coefficients", real_vector(s.coefficients)},
          {"left", matrix_to_json(s.left)},
          {"right", matrix_to_json(s.right)}};
}

SchmidtForm schmidt_from_json(const json& j) {
  SchmidtForm s;
  s.dim_left = j.at("dim_left").get<int>();
  s.dim_right = j.at("dim_right").get<int>();
  s.coefficients = real_vector_from(j.at("coefficients"));
  s.left = matrix_from_json(j.at("left"));
  s.right = matrix_from_json(j.at("right"));
  return s;
}

json to_json(const PartialReport& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"projector", matrix_to_json(b.projector)},
                      {"rank", b.rank},
                      {"weight", number(b.weight)},
                      {"level", number(b.level)},
                      {"certified", b.certified},
                      {"state_residual", number(b.state_residual)},
                      {"observables", matrices(b.observables)},
                      {"observable_errors", numbers(b.observable_errors)}});
  }
  return {{"commutant_dim", r.commutant_dim},
          {"violation", number(r.violation)},
          {"epsilon", number(r.epsilon)},
          {"max_stabilizer_residual", number(r.max_stabilizer_residual)},
          {"pa_rank", r.pa_rank},
          {"pa_levels", numbers(r.pa_levels)},
          {"commutation_residuals", numbers(r.commutation_residuals)},
          {"blocks", std::move(blocks)},
          {"verdict", std::string(to_string(r.verdict))}};
}

PartialReport partial_report_from_json(const json& j) {
  PartialReport r;
  r.commutant_dim = j.at("commutant_dim").get<int>();
  r.violation = number_from(j.at("violation"));
  r.epsilon = number_from(j.at("epsilon"));
  r.max_stabilizer_residual = number_from(j.at("max_stabilizer_residual"));
  r.pa_rank = j.at("pa_rank").get<int>();
  r.pa_levels = numbers_from(j.at("pa_levels"));
  r.commutation_residuals = numbers_from(j.at("commutation_residuals"));
  for (const auto& jb : j.at("blocks")) {
    CertifiedBlock b;
    b.projector = matrix_from_json(jb.at("projector"));
    b.rank = jb.at("rank").get<int>();
    b.weight = number_from(jb.at("weight"));
    b.level = number_from(jb.at("level"));
    b.certified = jb.at("certified").get<bool>();
    b.state_residual = number_from(jb.at("state_residual"));
    b.observables = matrices_from(jb.at("observables"));
    b.observable_errors = numbers_from(jb.at("observable_errors"));
    r.blocks.push_back(std::move(b));
  }
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  return r;
}

json to_json(const CertificationReport& r) {
  return {{"d", r.d},
          {"n_settings", r.n_settings},
          {"bob_dim", r.bob_dim},
          {"tolerance", number(r.tolerance)},
          {"violation", number(r.violation)},
          {"epsilon", number(r.epsilon)},
          {"stabilizer_residuals", real_matrix_to_json(r.stabilizer_residuals)},
          {"max_stabilizer_residual", number(r.max_stabilizer_residual)},
          {"genuinely_incompatible", r.genuinely_incompatible},
          {"shares_common_eigenvector", r.shares_common_eigenvector},
          {"schmidt", to_json(r.schmidt)},
          {"schmidt_rank", r.schmidt_rank},
          {"pa", matrix_to_json(r.pa)},
          {"pa_identity_residual", number(r.pa_identity_residual)},
          {"commutation_residuals", numbers(r.commutation_residuals)},
          {"bob_offdiagonal_residuals", numbers(r.bob_offdiagonal_residuals)},
          {"ub", matrix_to_json(r.ub)},
          {"observable_errors", numbers(r.observable_errors)},
          {"state_error", number(r.state_error)},
          {"verdict", std::string(to_string(r.verdict))},
          {"partial", r.partial ? to_json(*r.partial) : json(nullptr)}};
}

CertificationReport certification_from_json(const json& j) {
  CertificationReport r;
  r.d = j.at("d").get<int>();
  r.n_settings = j.at("n_settings").get<int>();
  r.bob_dim = j.at("bob_dim").get<int>();
  r.tolerance = number_from(j.at("tolerance"));
  r.violation = number_from(j.at("violation"));
  r.epsilon = number_from(j.at("epsilon"));
  r.stabilizer_residuals = real_matrix_from_json(j.at("stabilizer_residuals"));
  r.max_stabilizer_residual = number_from(j.at("max_stabilizer_residual"));
  r.genuinely_incompatible = j.at("genuinely_incompatible").get<bool>();
  r.shares_common_eigenvector = j.at("shares_common_eigenvector").get<bool>();
  r.schmidt = schmidt_from_json(j.at("schmidt"));
  r.schmidt_rank = j.at("schmidt_rank").get<int>();
  r.pa = matrix_from_json(j.at("pa"));
  r.pa_identity_residual = number_from(j.at("pa_identity_residual"));
  r.commutation_residuals = numbers_from(j.at("commutation_residuals"));
  r.bob_offdiagonal_residuals = numbers_from(j.at("bob_offdiagonal_residuals"));
  r.ub = matrix_from_json(j.at("ub"));
  r.observable_errors = numbers_from(j.at("observable_errors"));
  r.state_error = number_from(j.at("state_error"));
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  if (!j.at("partial").is_null()) r.partial = partial_report_from_json(j.at("partial"));
  return r;
}

json to_json(const RobustnessReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"i", c.i},
                      {"k", c.k},
                      {"value", number(c.value)},
                      {"bound", number(c.bound)},
                      {"relation", c.lower ? ">=" : "<="},
                      {"margin", number(c.margin)},
                      {"pass", c.pass}});
  return {{"d", r.d},
          {"l", r.l},
          {"violation", number(r.violation)},
          {"epsilon", number(r.epsilon)},
          {"state_bound", number(r.bounds.state_bound)},
          {"observable_bound", number(r.bounds.observable_bound)},
          {"alphas", real_vector(r.decomposition.alphas)},
          {"ub", matrix_to_json(r.ub)},
          {"state_distances", real_matrix_to_json(r.state_distances)},
          {"observable_distances_sq", real_matrix_to_json(r.observable_distances_sq)},
          {"max_state_distance", number(r.max_state_distance)},
          {"max_observable_distance_sq", number(r.max_observable_distance_sq)},
          {"aligned_state_distance", number(r.aligned_state_distance)},
          {"checks", std::move(checks)},
          {"all_intermediate_pass", r.all_intermediate_pass},
          {"all_bounds_pass", r.all_bounds_pass}};
}

json to_json(const BoundEstimate& b, int n_settings, int d) {
  const double beta_q = quantum_max(n_settings, d);
  json converged = json::array();
  for (bool c : b.converged) converged.push_back(c);
  return {{"best", number(b.best)},
          {"quantum_max", number(beta_q)},
          {"gap", number(beta_q - b.best)},
          {"restarts", b.restart_values.size()},
          {"converged_count", b.converged_count()},
          {"best_state", ket_to_json(b.best_state)},
          {"restart_values", numbers(b.restart_values)},
          {"iterations", b.iterations},
          {"converged", std::move(converged)}};
}

json incompatibility_report(std::span<const QuditObservable> alice, const Tolerances& tol) {
  const CommutantBasis comm = commutant(alice, tol);
  const bool genuine = comm.dimension() == 1;
  json out = {{"d", comm.d},
              {"n_settings", alice.size()},
              {"commutant_dim", comm.dimension()},
              {"genuinely_incompatible", genuine},
              {"shares_common_eigenvector", !genuine && shares_common_eigenvector(alice, tol)},
              {"invariant_subspace", nullptr}};
  if (!genuine) {
    if (const auto sub = common_invariant_subspace(alice, tol))
      out["invariant_subspace"] = {{"rank", sub->rank}, {"projector", matrix_to_json(sub->projector)}};
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json make_envelope(std::string_view command, const std::string& input_digest, std::uint64_t seed, json payload) {
  return {{"tool", "steerkit"},
          {"version", STEERKIT_VERSION},
          {"command", std::string(command)},
          {"input_sha256", input_digest},
          {"seed", seed},
          {"timestamp", utc_timestamp()},
          {"payload", std::move(payload)}};
}

}  // namespace steerkit
