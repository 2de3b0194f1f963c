#include "steerkit/scenario_file.hpp"

#include <cmath>

namespace steerkit {

namespace {

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

CMatrix read_matrix(const json& j, const std::string& path) {
  try {
    return matrix_from_json(j);
  } catch (const std::exception& e) {
    throw ScenarioError(path, e.what());
  }
}

QuditObservable make_observable(CMatrix m, int d, const std::string& path) {
  try {
    return QuditObservable(std::move(m), d);
  } catch (const std::exception& e) {
    throw ScenarioError(path, e.what());
  }
}

QuditObservable alice_entry(const json& j, int d, const std::string& path) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto [x, z] = generalized_pauli(d);
    if (name == "pauli_x") return x;
    if (name == "pauli_z") return z;
    throw ScenarioError(path, "unknown constructor '" + name + "'");
  }
  if (j.is_object()) {
    if (j.size() != 1 || !j.contains("mub")) throw ScenarioError(path, "expected {\"mub\": k}");
    const json& k = j.at("mub");
    if (!k.is_number_integer()) throw ScenarioError(path + ".mub", "expected an integer");
    try {
      return mub_observable(d, k.get<int>());
    } catch (const std::exception& e) {
      throw ScenarioError(path + ".mub", e.what());
    }
  }
  const CMatrix m = read_matrix(j, path);
  if (m.rows() != d || m.cols() != d)
    throw ScenarioError(path, "expected a " + std::to_string(d) + " x " + std::to_string(d) + " matrix");
  return make_observable(m, d, path);
}

std::vector<QuditObservable> read_alice(const json& j, int d) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    std::vector<QuditObservable> set;
    try {
      set = builtin_example(name);
    } catch (const std::exception& e) {
      throw ScenarioError("alice", e.what());
    }
    if (set.front().dim() != d)
      throw ScenarioError("alice", "'" + name + "' has d = " + std::to_string(set.front().dim()));
    return set;
  }
  if (!j.is_array() || j.empty()) throw ScenarioError("alice", "expected a nonempty list or a named set");
  std::vector<QuditObservable> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(alice_entry(j[i], d, indexed("alice", i)));
  return out;
}

std::vector<QuditObservable> read_bob(const json* j, const std::vector<QuditObservable>& alice, int d) {
  if (j == nullptr || (j->is_string() && j->get<std::string>() == "ideal")) {
    std::vector<QuditObservable> out;
    for (const auto& a : alice) out.push_back(conjugate_observable(a));
    return out;
  }
  if (!j->is_array()) throw ScenarioError("bob", "expected \"ideal\" or a list of matrices");
  if (j->size() != alice.size())
    throw ScenarioError("bob", "expected " + std::to_string(alice.size()) + " observables, got " +
                                   std::to_string(j->size()));
  std::vector<QuditObservable> out;
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string path = indexed("bob", i);
    const CMatrix m = read_matrix((*j)[i], path);
    if (m.rows() != m.cols() || m.rows() < d) throw ScenarioError(path, "expected a square matrix of size >= d");
    out.push_back(make_observable(m, d, path));
  }
  return out;
}

Ket read_state(const json* j, int d, int big_d) {
  if (j == nullptr || (j->is_string() && j->get<std::string>() == "maximally_entangled"))
    return maximally_entangled(d, big_d);
  if (j->is_string()) throw ScenarioError("state", "unknown state '" + j->get<std::string>() + "'");
  if (j->is_object()) {
    if (j->size() != 1 || !j->contains("schmidt")) throw ScenarioError("state", "expected {\"schmidt\": [...]}");
    const json& lambdas = j->at("schmidt");
    if (!lambdas.is_array() || lambdas.empty() || static_cast<int>(lambdas.size()) > d)
      throw ScenarioError("state.schmidt", "expected between 1 and d coefficients");
    CMatrix coeffs = CMatrix::Zero(d, big_d);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!lambdas[i].is_number() || lambdas[i].get<double>() < 0.0)
        throw ScenarioError(indexed("state.schmidt", i), "expected a nonnegative number");
      coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = lambdas[i].get<double>();
    }
    return from_coefficient_matrix(coeffs);
  }
  Ket psi;
  try {
    psi = ket_from_json(*j);
  } catch (const std::exception& e) {
    throw ScenarioError("state", e.what());
  }
  if (psi.size() != static_cast<Eigen::Index>(d) * big_d)
    throw ScenarioError("state", "expected " + std::to_string(d * big_d) + " amplitudes, got " +
                                     std::to_string(psi.size()));
  return psi;
}

}  // namespace

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ScenarioError("(document)", "expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "d" && key != "alice" && key != "bob" && key != "state")
      throw ScenarioError(key, "unknown field");
  if (!j.contains("d") || !j.at("d").is_number_integer()) throw ScenarioError("d", "expected an integer");
  const int d = j.at("d").get<int>();
  if (d < 2) throw ScenarioError("d", "must be at least 2");
  if (!j.contains("alice")) throw ScenarioError("alice", "missing");

  std::vector<QuditObservable> alice = read_alice(j.at("alice"), d);
  std::vector<QuditObservable> bob = read_bob(j.contains("bob") ? &j.at("bob") : nullptr, alice, d);
  const int big_d = bob.front().dim();
  for (std::size_t i = 1; i < bob.size(); ++i)
    if (bob[i].dim() != big_d) throw ScenarioError(indexed("bob", i), "Bob observables differ in dimension");
  Ket psi = read_state(j.contains("state") ? &j.at("state") : nullptr, d, big_d);
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw ScenarioError("state", "not normalized (norm " + std::to_string(psi.norm()) + ")");
  try {
    return Scenario(std::move(alice), std::move(bob), std::move(psi));
  } catch (const std::exception& e) {
    throw ScenarioError("(scenario)", e.what());
  }
}

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("(document)", e.what());
  }
  return parse_scenario(j);
}

}  // namespace steerkit
