#pragma once

#include "steerkit/report.hpp"

#include <stdexcept>
#include <string>

namespace steerkit {

/// Malformed scenario input. The message starts with the field path, e.g.
/// "alice[1]: matrix is not unitary".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Scenario file schema:
///   d      count
///   alice  list of entries, each a matrix, "pauli_x", "pauli_z" or {"mub": k};
///          or one of the named sets "weaker_d4_pair", "triple_d4"
///   bob    "ideal" (default; conjugates of alice) or a list of matrices
///   state  "maximally_entangled" (default), {"schmidt": [lambda...]} or an
///          amplitude list of length d * D
/// Matrix entries are numbers or [re, im] pairs.
Scenario parse_scenario(const json& j);

/// Parses JSON text; syntax errors report line and column.
Scenario parse_scenario_text(const std::string& text);

}  // namespace steerkit
