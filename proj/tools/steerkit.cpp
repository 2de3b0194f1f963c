#include "steerkit/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace steerkit;

  CLI::App app{"Steering functionals, self-testing certification and robustness checks for qudit observables"};
  app.require_subcommand(1);

  CheckOptions check;
  CertifyOptions certify;
  BoundOptions bound;
  SweepOptions sweep;

  auto add_common = [](CLI::App* sub, CommonOptions& o) {
    sub->add_option("--seed", o.seed, "Random seed")->default_val(0);
    sub->add_option("--out", o.out, "Write output to this path instead of stdout");
  };

  auto* c = app.add_subcommand("check", "Commutant and genuine-incompatibility analysis of Alice's observables");
  c->add_option("scenario", check.path, "Scenario file (JSON)")->required();
  add_common(c, check);

  auto* s = app.add_subcommand("certify", "Self-testing certification of a scenario");
  s->add_option("scenario", certify.path, "Scenario file (JSON)")->required();
  s->add_option("--tol", certify.tol, "Certification tolerance")->default_val(1e-8);
  add_common(s, certify);

  auto* b = app.add_subcommand("bound", "Estimate the classical bound by multi-start gradient ascent");
  b->add_option("scenario", bound.path, "Scenario file (JSON)")->required();
  b->add_option("--restarts", bound.restarts, "Number of random starts")->default_val(200);
  add_common(b, bound);

  auto* w = app.add_subcommand("sweep", "Check the robustness bounds over a noise grid (CSV)");
  w->add_option("--d", sweep.d, "Local dimension")->required();
  w->add_option("--l", sweep.l, "Power of Z in the first observable X Z^l")->default_val(0);
  w->add_option("--theta", sweep.theta, "State rotation grid start:step:count or a number")->default_val("0");
  w->add_option("--delta", sweep.delta, "Observable noise grid start:step:count or a number")->default_val("0");
  add_common(w, sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::input_error;
  }

  if (c->parsed()) return cmd_check(check, std::cout, std::cerr);
  if (s->parsed()) return cmd_certify(certify, std::cout, std::cerr);
  if (b->parsed()) return cmd_bound(bound, std::cout, std::cerr);
  return cmd_sweep(sweep, std::cout, std::cerr);
}
