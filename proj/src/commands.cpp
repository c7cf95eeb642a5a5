#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "sgm/campanato.hpp"
#include "sgm/cli_io.hpp"
#include "sgm/cylinder_analysis.hpp"
#include "sgm/errors.hpp"
#include "sgm/local_energy.hpp"
#include "sgm/singular_set.hpp"
#include "sgm/solver.hpp"

namespace sgm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kEnergyTol = 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kMeanTol = 1e-13;
// slack floor per unit of tau and of max(1, ||u0||^2)
constexpr double kLeiTolPerTau = 5e-2;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw BadInput("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw BadInput("cannot open " + path.string() + " for writing");
  os << text;
}

struct RunMeta {
  SolverConfig solver;
  std::vector<int> halvings;
  bool present = false;
};

RunMeta load_meta(const fs::path& traj_path) {
  RunMeta m;
  const auto p = meta_path(traj_path);
  if (!fs::exists(p)) return m;
  std::ifstream is(p);
  json j;
  try {
    j = json::parse(is);
    m.solver = parse_run_config(j.at("config").dump()).solver;
    if (j.contains("halvings")) m.halvings = j.at("halvings").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw BadInput("unreadable run metadata " + p.string() + ": " + e.what());
  }
  m.present = true;
  return m;
}

}  // namespace

std::vector<VerifyCheck> verify_trajectory(const Trajectory& traj, const std::vector<int>* halvings) {
  std::vector<VerifyCheck> out;
  const auto& cfg = traj.config();
  auto halved = [&](std::size_t k) { return halvings && k < halvings->size() && (*halvings)[k] > 0; };

  VerifyCheck mean{"mean_zero", true, false, ""};
  double worst_mean = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double m = std::abs(traj.frame(k).u.mean());
    worst_mean = std::max(worst_mean, m);
    if (m >= kMeanTol && mean.passed) {
      mean.passed = false;
      mean.detail = "frame " + std::to_string(k) + ": |mean| = " + fmt(m);
    }
  }
  if (mean.passed) mean.detail = "max |mean| = " + fmt(worst_mean);
  out.push_back(mean);

  VerifyCheck en{"energy", true, false, ""};
  const double e0 = std::max(energy(traj.frame(0).u), std::numeric_limits<double>::min());
  const bool identity = !cfg.nonlinear || cfg.dealias;
  double worst_gap = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const auto& u = traj.frame(k).u;
    const auto& prev = traj.frame(k - 1).u;
    const double tau = traj.frame(k).t - traj.frame(k - 1).t;
    const double ek = energy(u), ep = energy(prev);
    double gap;
    if (identity && !halved(k)) {
      const double d = sobolev_norm(u, {2.0, true});
      gap = std::abs(ek + energy(u - prev) + 2 * tau * d * d - ep) / e0;
    } else {
      gap = std::max(0.0, ek - ep) / e0;
    }
    worst_gap = std::max(worst_gap, gap);
    if (gap > kEnergyTol && en.passed) {
      en.passed = false;
      en.detail = "frame " + std::to_string(k) + ": energy balance off by " + fmt(gap) + " (relative)";
    }
  }
  if (en.passed) en.detail = "max relative gap " + fmt(worst_gap);
  out.push_back(en);

  VerifyCheck res{"scheme_residual", true, false, ""};
  double worst_res = 0;
  std::size_t skipped = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (halved(k)) {
      ++skipped;
      continue;
    }
    const double tau = traj.frame(k).t - traj.frame(k - 1).t;
    const double r = scheme_residual(traj.frame(k - 1).u, traj.frame(k).u, tau, cfg);
    worst_res = std::max(worst_res, r);
    if (r > kResidualTol && res.passed) {
      res.passed = false;
      res.detail = "frame " + std::to_string(k) + ": residual " + fmt(r);
    }
  }
  if (res.passed) res.detail = "max residual " + fmt(worst_res);
  if (skipped) res.detail += " (" + std::to_string(skipped) + " halved steps skipped)";
  out.push_back(res);

  VerifyCheck lei{"lei_slack", true, false, ""};
  VerifyCheck weak{"weak_residual", true, false, ""};
  if (traj.size() < 8) {
    lei.skipped = weak.skipped = true;
    lei.detail = weak.detail = "run too short";
  } else {
    double worst = std::numeric_limits<double>::infinity(), wr = 0;
    std::size_t used = 0;
    for (const auto& phi : lei_probe_family(traj)) {
      try {
        worst = std::min(worst, lei_slack(traj, phi, traj.t_end()));
        wr = std::max(wr, weak_residual(traj, phi));
        ++used;
      } catch (const OutsideDomain&) {
      } catch (const std::invalid_argument&) {
      }
    }
    if (used == 0) {
      lei.skipped = weak.skipped = true;
      lei.detail = weak.detail = "no probe fits the run";
    } else {
      double tau_max = 0;
      for (std::size_t k = 1; k < traj.size(); ++k) tau_max = std::max(tau_max, traj.frame(k).t - traj.frame(k - 1).t);
      const double floor = -kLeiTolPerTau * tau_max * std::max(1.0, energy(traj.frame(0).u));
      lei.passed = worst >= floor;
      lei.detail = "min slack " + fmt(worst) + " over " + std::to_string(used) + " probes (floor " + fmt(floor) + ")";
      weak.detail = "max |weak residual| " + fmt(wr) + " (reported, O(tau))";
    }
  }
  out.push_back(lei);
  out.push_back(weak);
  return out;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  SpectralField u0;
  try {
    cfg = load_run_config(opt.config);
    if (opt.ic) cfg.ic = *opt.ic;
    if (opt.tau) cfg.solver.tau = *opt.tau;
    if (opt.t_end) cfg.solver.t_end = *opt.t_end;
    if (opt.out) cfg.output_dir = *opt.out;
    try {
      cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
      throw BadInput(e.what());
    }
    u0 = initial_condition(cfg.ic, cfg.n_grid);
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  RunLog log;
  std::optional<Trajectory> traj;
  try {
    traj.emplace(simulate(u0, cfg.solver, &log));
  } catch (const NonConvergence& e) {
    err << "solver failure at step " << e.step() << ": " << e.what() << '\n';
    return kExitSolverFailure;
  }
  try {
    const fs::path dir = cfg.output_dir;
    ensure_dir(dir);
    const auto path = dir / "trajectory.sgt1";
    write_sgt1_file(path, *traj);
    nlohmann::ordered_json meta;
    meta["config"] = json::parse(to_json(cfg));
    meta["n_frames"] = traj->size();
    meta["t_end"] = traj->t_end();
    meta["energy"] = log.energy;
    meta["dissipation"] = std::vector<double>(traj->dissipation().begin(), traj->dissipation().end());
    meta["picard_iterations"] = log.picard_iterations;
    meta["halvings"] = log.halvings;
    write_text(meta_path(path), meta.dump(2) + "\n");
    out << "wrote " << path.string() << " (" << traj->size() << " frames, n_grid " << traj->n_grid() << ")\n";
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::optional<Trajectory> traj;
  try {
    cfg = load_run_config(opt.config);
    if (opt.criterion) cfg.analysis.criterion = parse_criterion(*opt.criterion);
    if (opt.out) cfg.output_dir = *opt.out;
    traj.emplace(read_sgt1_file(opt.traj, cfg.solver));
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  const auto& th = cfg.analysis.thresholds;
  const auto grid = default_grid(*traj, cfg.analysis.nx, cfg.analysis.nt);
  RegularityReport rep;
  try {
    rep = regularity_report(*traj, grid, th, cfg.analysis.criterion);
  } catch (const TooFewFrames& e) {
    err << "resolution failure: " << e.what() << "; use smaller radii or a smaller tau\n";
    return kExitResolutionFailure;
  }
  if (rep.suspect_points.empty() && rep.regular == 0) {
    err << "resolution failure: no scan radius holds 4 frames inside the run at any grid point; "
           "use smaller radii, a smaller tau or a longer run\n";
    return kExitResolutionFailure;
  }

  std::vector<CylinderRow> rows;
  for (std::size_t i = 0; i < grid.nt; ++i) {
    const double t = grid.t_lo + (grid.t_hi - grid.t_lo) * static_cast<double>(i) / static_cast<double>(grid.nt - 1);
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const double x = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid.nx);
      for (double r : th.r_scan) {
        const ParabolicCylinder q{x, t, r};
        if (!fits(*traj, q)) continue;
        try {
          rows.push_back({q, quantities(*traj, q)});
        } catch (const TooFewFrames&) {
        }
      }
    }
  }

  const double t_mid = 0.5 * (traj->t_begin() + traj->t_end());
  json poincare = json::array(), interp = json::array(), decay = json::array();
  double c_p = 0, c_w = 0, c_y = 0;
  for (double x : {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi}) {
    for (double r : th.r_scan) {
      const ParabolicCylinder q{x, t_mid, r};
      if (!fits(*traj, q)) continue;
      try {
        const auto pc = poincare_residual(*traj, {x, t_mid}, r, 1.0);
        poincare.push_back({{"x", x}, {"t", t_mid}, {"r", r}, {"lhs", pc.lhs}, {"rhs_bound", pc.rhs_bound},
                            {"c_emp", pc.c_emp}, {"violation", pc.violation}});
        c_p = std::max(c_p, pc.c_emp);
      } catch (const TooFewFrames&) {
      }
      try {
        const auto ic = interpolation_residuals(quantities(*traj, q));
        interp.push_back({{"x", x}, {"t", t_mid}, {"r", r}, {"gap_W", ic.gap_W}, {"gap_Y", ic.gap_Y},
                          {"c_emp_W", ic.c_emp_W}, {"c_emp_Y", ic.c_emp_Y}});
        c_w = std::max(c_w, ic.c_emp_W);
        c_y = std::max(c_y, ic.c_emp_Y);
      } catch (const TooFewFrames&) {
      }
      try {
        const double theta = 0.2;
        decay.push_back({{"x", x}, {"t", t_mid}, {"r", r}, {"theta", theta},
                         {"ratio", decay_ratio(*traj, {x, t_mid}, r, theta)}});
      } catch (const TooFewFrames&) {
      }
    }
  }

  try {
    const fs::path dir = cfg.output_dir;
    ensure_dir(dir);
    auto j = json::parse(to_json(rep));
    j["poincare"] = poincare;
    j["poincare_c_emp_max"] = c_p;
    j["interpolation"] = interp;
    j["interpolation_c_emp_max"] = {{"W", c_w}, {"Y", c_y}};
    j["decay_ratios"] = decay;
    if (decay.empty()) j["warnings"].push_back("no decay ratio computed: Q(z, theta r) holds fewer than 4 frames");
    write_text(dir / "report.json", j.dump(2) + "\n");
    std::ofstream csv(dir / "cylinder_stats.csv");
    if (!csv) throw BadInput("cannot open " + (dir / "cylinder_stats.csv").string());
    write_stats_csv(csv, rows);
    out << "criterion " << to_string(rep.criterion) << ": " << rep.suspect_points.size() << " suspect, "
        << rep.regular << " regular, " << rep.unclassifiable << " unclassifiable; dimension "
        << rep.dimension_estimate << "; report " << (dir / "report.json").string() << '\n';
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_verify(const fs::path& traj_path, std::ostream& out, std::ostream& err) {
  std::optional<Trajectory> traj;
  RunMeta meta;
  try {
    meta = load_meta(traj_path);
    traj.emplace(read_sgt1_file(traj_path, meta.solver));
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  const auto checks = verify_trajectory(*traj, meta.present ? &meta.halvings : nullptr);
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.skipped ? "SKIP " : c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && (c.passed || c.skipped);
  }
  out << (ok ? "verify: pass" : "verify: fail") << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_campanato(const CampanatoOptions& opt, std::ostream& out, std::ostream& err) {
  SampledField f;
  try {
    if (!(opt.p >= 1)) throw BadInput("p must be at least 1");
    if (!(opt.beta >= 0)) throw BadInput("beta must be nonnegative");
    if (opt.alpha < 1) throw BadInput("alpha must be a positive integer");
    if (is_sgt1_file(opt.input)) {
      f = field_from_trajectory(read_sgt1_file(opt.input));
    } else {
      std::ifstream is(opt.input);
      if (!is) throw BadInput("cannot open " + opt.input.string());
      f = read_field_csv(is);
    }
    f.validate();
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  const auto region = full_region(f);
  const auto grids = default_grids(f, region, opt.alpha);
  try {
    if (grids.r.empty()) throw UnderResolved("field too coarse: no radius resolves 4 nodes per axis");
    const auto fit = holder_fit(f, region, opt.p, grids, opt.alpha);
    const double m = campanato_seminorm(f, region, opt.p, opt.beta, grids, opt.alpha);
    out << to_json(fit, m, opt.p, opt.beta) << '\n';
  } catch (const UnderResolved& e) {
    err << "resolution failure: " << e.what() << '\n';
    return kExitResolutionFailure;
  } catch (const std::invalid_argument& e) {
    err << "resolution failure: " << e.what() << '\n';
    return kExitResolutionFailure;
  }
  return kExitOk;
}

std::vector<PlanePoint> read_points_csv(std::istream& is) {
  std::vector<PlanePoint> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw BadInput("points line " + std::to_string(lineno) + ": expected x,t");
    }
    try {
      std::size_t a = 0, b = 0;
      const std::string xs = line.substr(0, comma), ts = line.substr(comma + 1);
      const double x = std::stod(xs, &a), t = std::stod(ts, &b);
      if (!std::isfinite(x) || !std::isfinite(t)) throw std::invalid_argument("non-finite");
      pts.push_back({x, t});
    } catch (const std::exception&) {
      if (lineno == 1) continue;
      throw BadInput("points line " + std::to_string(lineno) + ": non-numeric entry");
    }
  }
  return pts;
}

int cmd_dim(const DimOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<PlanePoint> pts;
  try {
    std::ifstream is(opt.points);
    if (!is) throw BadInput("cannot open " + opt.points.string());
    pts = read_points_csv(is);
    for (double d : opt.deltas)
      if (!(d > 0)) throw BadInput("deltas must be positive");
  } catch (const BadInput& e) {
    err << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  }
  double spread = 0;
  if (!pts.empty()) {
    auto [xl, xh] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; });
    auto [tl, th] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.t < b.t; });
    spread = std::max(xh->x - xl->x, th->t - tl->t);
  }
  if (spread <= 0) spread = 1.0;
  std::vector<double> deltas = opt.deltas;
  if (deltas.empty()) deltas = {spread / 8, spread / 16, spread / 32, spread / 64};
  nlohmann::ordered_json j;
  j["n_points"] = pts.size();
  j["deltas"] = deltas;
  try {
    j["areas"] = neighbourhood_areas(pts, deltas);
    j["dimension"] = box_dimension(pts, deltas);
  } catch (const std::invalid_argument& e) {
    err << "resolution failure: " << e.what() << '\n';
    return kExitResolutionFailure;
  }
  json counts = json::array();
  for (double r : {spread / 8, spread / 16, spread / 32}) {
    if (!(r < 0.5 * std::numbers::pi)) continue;
    const auto c = cylinder_counts(pts, r);
    counts.push_back({{"r", r}, {"M_r", c.M}, {"N_r", c.N}});
  }
  j["counts"] = counts;
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace sgm
