#include <CLI11.hpp>

#include <iostream>

#include "sgm/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sgm: surface growth model simulator and regularity diagnostics"};
  app.require_subcommand(1);

  sgm::SimulateOptions sim;
  std::string ic, out_dir;
  double tau = 0, t_end = 0;
  auto* s = app.add_subcommand("simulate", "run the implicit Euler solver and write an SGT1 trajectory");
  s->add_option("--config", sim.config, "JSON run configuration")->required();
  auto* ic_opt = s->add_option("--ic", ic, "initial condition: mode:k,amp | random:seed,n_modes,amp | file:path");
  auto* tau_opt = s->add_option("--tau", tau, "time step");
  auto* t_end_opt = s->add_option("--t-end", t_end, "final time");
  auto* out_opt = s->add_option("--out", out_dir, "output directory");

  sgm::AnalyzeOptions an;
  std::string criterion, an_out;
  auto* a = app.add_subcommand("analyze", "scan a trajectory for suspect points and write the regularity report");
  a->add_option("--traj", an.traj, "SGT1 trajectory")->required();
  a->add_option("--config", an.config, "JSON run configuration")->required();
  auto* crit_opt = a->add_option("--criterion", criterion, "y, e or a");
  auto* an_out_opt = a->add_option("--out", an_out, "output directory (default: config output_dir)");

  std::filesystem::path verify_traj;
  auto* v = app.add_subcommand("verify", "check energy, mean, scheme residual and LEI slack of a trajectory");
  v->add_option("--traj", verify_traj, "SGT1 trajectory")->required();

  sgm::CampanatoOptions cp;
  auto* c = app.add_subcommand("campanato", "Campanato seminorm and Hoelder exponent fit of sampled data");
  c->add_option("--input", cp.input, "CSV x,t,value or SGT1 file")->required();
  c->add_option("--p", cp.p, "oscillation exponent")->capture_default_str();
  c->add_option("--beta", cp.beta, "exponent of the seminorm")->capture_default_str();
  c->add_option("--alpha", cp.alpha, "time scaling exponent")->capture_default_str();

  sgm::DimOptions dim;
  auto* d = app.add_subcommand("dim", "box-counting dimension and cylinder counts of a point set");
  d->add_option("--points", dim.points, "CSV x,t")->required();
  d->add_option("--deltas", dim.deltas, "neighbourhood radii (default: from the point spread)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sgm::kExitBadInput;
  }

  if (s->parsed()) {
    if (*ic_opt) sim.ic = ic;
    if (*tau_opt) sim.tau = tau;
    if (*t_end_opt) sim.t_end = t_end;
    if (*out_opt) sim.out = out_dir;
    return sgm::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (a->parsed()) {
    if (*crit_opt) an.criterion = criterion;
    if (*an_out_opt) an.out = an_out;
    return sgm::cmd_analyze(an, std::cout, std::cerr);
  }
  if (v->parsed()) return sgm::cmd_verify(verify_traj, std::cout, std::cerr);
  if (c->parsed()) return sgm::cmd_campanato(cp, std::cout, std::cerr);
  if (d->parsed()) return sgm::cmd_dim(dim, std::cout, std::cerr);
  return sgm::kExitBadInput;
}
