#pragma once

#include "steerkit/incompat.hpp"
#include "steerkit/robustness.hpp"
#include "steerkit/selftest.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace steerkit {

using json = nlohmann::json;

// Complex entries are [re, im]; matrices are row-major nested arrays.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);
json real_matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd real_matrix_from_json(const json& j);
json ket_to_json(const Ket& v);
Ket ket_from_json(const json& j);

json to_json(const SchmidtForm& s);
SchmidtForm schmidt_from_json(const json& j);

json to_json(const PartialReport& r);
PartialReport partial_report_from_json(const json& j);

json to_json(const CertificationReport& r);
CertificationReport certification_from_json(const json& j);

json to_json(const RobustnessReport& r);
json to_json(const BoundEstimate& b, int n_settings, int d);

/// Commutant dimension, incompatibility verdicts and, when the set is not
/// genuinely incompatible, one common invariant subspace.
json incompatibility_report(std::span<const QuditObservable> alice, const Tolerances& tol = default_tolerances);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// UTC time, ISO 8601 with a trailing Z.
std::string utc_timestamp();

json make_envelope(std::string_view command, const std::string& input_digest, std::uint64_t seed, json payload);

}  // namespace steerkit
