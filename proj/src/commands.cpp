#include "steerkit/commands.hpp"

#include "steerkit/scenario_file.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace steerkit {

namespace {

struct LoadedInput {
  std::string digest;
  Scenario scenario;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("(file)", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LoadedInput load(const std::string& path) {
  const std::string text = read_file(path);
  return {sha256_hex(text), parse_scenario_text(text)};
}

void emit(const CommonOptions& o, const std::string& contents, std::ostream& out) {
  if (o.out)
    write_atomically(*o.out, contents);
  else
    out << contents;
}

void emit_json(const CommonOptions& o, std::string_view command, const std::string& digest, json payload,
               std::ostream& out) {
  emit(o, make_envelope(command, digest, o.seed, std::move(payload)).dump(2) + "\n", out);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs body, mapping input and I/O errors to exit code 1.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return exit_code::input_error;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << contents;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedInput in = load(o.path);
    json payload = incompatibility_report(in.scenario.alice());
    const bool genuine = payload.at("genuinely_incompatible").get<bool>();
    emit_json(o, "check", in.digest, std::move(payload), out);
    return genuine ? exit_code::ok : exit_code::negative;
  });
}

int cmd_certify(const CertifyOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(o.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    const LoadedInput in = load(o.path);
    const CertificationReport report = certify(in.scenario, o.tol);
    emit_json(o, "certify", in.digest, to_json(report), out);
    switch (report.verdict) {
      case Verdict::certified: return exit_code::ok;
      case Verdict::partial: return exit_code::partial;
      case Verdict::failed: break;
    }
    return exit_code::negative;
  });
}

int cmd_bound(const BoundOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.restarts < 1) throw std::invalid_argument("--restarts must be at least 1");
    const LoadedInput in = load(o.path);
    const auto& alice = in.scenario.alice();
    const BoundEstimate est = classical_bound_estimate(alice, o.restarts, o.seed);
    emit_json(o, "bound", in.digest, to_json(est, in.scenario.n_settings(), in.scenario.d()), out);
    return exit_code::ok;
  });
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.d < 2) throw std::invalid_argument("--d must be at least 2");
    if (o.l < 0 || o.l >= o.d) throw std::invalid_argument("--l must lie in [0, d)");
    const std::vector<double> thetas = parse_grid(o.theta);
    const std::vector<double> deltas = parse_grid(o.delta);
    for (double t : thetas) NoiseSpec{t, 0.0, 0}.validate();
    for (double dl : deltas) NoiseSpec{0.0, dl, 0}.validate();

    const std::vector<SweepRow> rows = run_sweep(o.d, o.l, thetas, deltas, o.seed);
    std::string csv =
        "point_index,theta,delta,epsilon,state_bound,obs_bound,max_state_dist,max_obs_dist_sq,"
        "all_intermediate_pass,all_bounds_pass\n";
    bool all_pass = true;
    for (const auto& r : rows) {
      if (!r.error.empty()) err << "point " << r.index << ": " << r.error << "\n";
      all_pass = all_pass && r.error.empty() && r.all_intermediate_pass && r.all_bounds_pass;
      csv += std::to_string(r.index) + "," + format_double(r.theta) + "," + format_double(r.delta) + "," +
             format_double(r.epsilon) + "," + format_double(r.state_bound) + "," +
             format_double(r.observable_bound) + "," + format_double(r.max_state_distance) + "," +
             format_double(r.max_observable_distance_sq) + "," + (r.all_intermediate_pass ? "true" : "false") +
             "," + (r.all_bounds_pass ? "true" : "false") + "\n";
    }
    emit(o, csv, out);
    return all_pass ? exit_code::ok : exit_code::negative;
  });
}

}  // namespace steerkit
