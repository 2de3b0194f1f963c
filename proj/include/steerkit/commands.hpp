#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace steerkit {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 1;
inline constexpr int negative = 2;  // not genuinely incompatible / failed / some sweep row failed
inline constexpr int partial = 3;
}  // namespace exit_code

struct CommonOptions {
  std::uint64_t seed = 0;
  std::optional<std::string> out;  // stdout when empty
};

struct CheckOptions : CommonOptions {
  std::string path;
};

struct CertifyOptions : CommonOptions {
  std::string path;
  double tol = 1e-8;
};

struct BoundOptions : CommonOptions {
  std::string path;
  int restarts = 200;
};

struct SweepOptions : CommonOptions {
  int d = 2;
  int l = 0;
  std::string theta = "0";
  std::string delta = "0";
};

// Each command writes its document to options.out (atomically) or to out,
// diagnostics to err, and returns the process exit code.
int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err);
int cmd_certify(const CertifyOptions& o, std::ostream& out, std::ostream& err);
int cmd_bound(const BoundOptions& o, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err);

/// Writes to a sibling temporary file and renames it over path.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace steerkit
