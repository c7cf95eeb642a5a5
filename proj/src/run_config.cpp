#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "sgm/cli_io.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw BadInput("bad number '" + s + "' in " + what);
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw BadInput("bad integer '" + s + "' in " + what);
  }
}

SpectralField samples_from_file(const std::string& path) {
  if (is_sgt1_file(path)) {
    const auto traj = read_sgt1_file(path);
    return traj.frames().back().u;
  }
  std::ifstream is(path);
  if (!is) throw BadInput("cannot open initial-condition file " + path);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) v.push_back(parse_double(tok, path));
  if (!valid_grid_size(v.size())) {
    throw BadInput("initial-condition file " + path + " holds " + std::to_string(v.size()) +
                   " samples; need a power of two >= 16");
  }
  return SpectralField::from_samples(std::move(v));
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw BadInput(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw BadInput("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read_key(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw BadInput("bad value for '" + std::string(key) + "' in " + where);
  }
}

}  // namespace

SpectralField initial_condition(const std::string& spec, std::size_t n_grid) {
  if (!valid_grid_size(n_grid)) throw BadInput("n_grid must be a power of two >= 16");
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw BadInput("initial condition '" + spec + "' lacks a kind prefix");
  const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  SpectralField u;
  if (kind == "mode") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw BadInput("expected mode:k,amp");
    const long k = parse_long(parts[0], spec);
    const double amp = parse_double(parts[1], spec);
    if (k < 1 || static_cast<std::size_t>(k) >= n_grid / 2) throw BadInput("mode k must lie in [1, n_grid/2)");
    u = SpectralField::from_function(n_grid, [&](double x) { return amp * std::cos(static_cast<double>(k) * x); });
  } else if (kind == "random") {
    const auto parts = split(rest, ',');
    if (parts.size() != 3) throw BadInput("expected random:seed,n_modes,amp");
    const long seed = parse_long(parts[0], spec), modes = parse_long(parts[1], spec);
    const double amp = parse_double(parts[2], spec);
    if (modes < 1 || static_cast<std::size_t>(modes) >= n_grid / 2) {
      throw BadInput("n_modes must lie in [1, n_grid/2)");
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> a(modes), b(modes);
    for (long k = 0; k < modes; ++k) {
      a[k] = d(rng);
      b[k] = d(rng);
    }
    std::vector<double> v(n_grid, 0.0);
    double ms = 0.0;
    for (std::size_t j = 0; j < n_grid; ++j) {
      const double x = SpectralField::grid_point(n_grid, j);
      for (long k = 0; k < modes; ++k) v[j] += (a[k] * std::cos((k + 1) * x) + b[k] * std::sin((k + 1) * x)) / (k + 1);
      ms += v[j] * v[j] / static_cast<double>(n_grid);
    }
    const double scale = ms > 0 ? amp / std::sqrt(ms) : 0.0;
    for (double& s : v) s *= scale;
    u = SpectralField::from_samples(std::move(v));
  } else if (kind == "file") {
    u = samples_from_file(rest);
    if (u.n_grid() != n_grid) {
      throw BadInput("initial-condition file has " + std::to_string(u.n_grid()) + " samples, config n_grid is " +
                     std::to_string(n_grid));
    }
  } else {
    throw BadInput("unknown initial-condition kind '" + kind + "'");
  }
  if (!u.is_mean_zero()) throw BadInput("initial condition must have zero mean");
  return u;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw BadInput(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"ic", "n_grid", "solver", "analysis", "output_dir"}, "config");
  RunConfig c;
  read_key(j, "ic", c.ic, "config");
  read_key(j, "n_grid", c.n_grid, "config");
  read_key(j, "output_dir", c.output_dir, "config");
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, {"tau", "t_end", "picard_tol", "picard_max_iter", "step_halving_max", "dealias", "nonlinear"},
               "solver");
    read_key(s, "tau", c.solver.tau, "solver");
    read_key(s, "t_end", c.solver.t_end, "solver");
    read_key(s, "picard_tol", c.solver.picard_tol, "solver");
    read_key(s, "picard_max_iter", c.solver.picard_max_iter, "solver");
    read_key(s, "step_halving_max", c.solver.step_halving_max, "solver");
    read_key(s, "dealias", c.solver.dealias, "solver");
    read_key(s, "nonlinear", c.solver.nonlinear, "solver");
  }
  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    check_keys(a, {"eps0", "eps1", "eps2", "R0", "r_scan", "nx", "nt", "criterion"}, "analysis");
    auto& th = c.analysis.thresholds;
    read_key(a, "eps0", th.eps0, "analysis");
    read_key(a, "eps1", th.eps1, "analysis");
    read_key(a, "eps2", th.eps2, "analysis");
    read_key(a, "R0", th.R0, "analysis");
    read_key(a, "r_scan", th.r_scan, "analysis");
    read_key(a, "nx", c.analysis.nx, "analysis");
    read_key(a, "nt", c.analysis.nt, "analysis");
    std::string crit = to_string(c.analysis.criterion);
    read_key(a, "criterion", crit, "analysis");
    c.analysis.criterion = parse_criterion(crit);
  }
  if (!valid_grid_size(c.n_grid)) throw BadInput("n_grid must be a power of two >= 16");
  if (c.analysis.nx < 1 || c.analysis.nt < 2) throw BadInput("analysis grid needs nx >= 1 and nt >= 2");
  try {
    c.solver.validate();
    c.analysis.thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw BadInput(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw BadInput("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& c, int indent) {
  nlohmann::ordered_json j;
  j["ic"] = c.ic;
  j["n_grid"] = c.n_grid;
  j["solver"] = {{"tau", c.solver.tau},
                 {"t_end", c.solver.t_end},
                 {"picard_tol", c.solver.picard_tol},
                 {"picard_max_iter", c.solver.picard_max_iter},
                 {"step_halving_max", c.solver.step_halving_max},
                 {"dealias", c.solver.dealias},
                 {"nonlinear", c.solver.nonlinear}};
  const auto& th = c.analysis.thresholds;
  j["analysis"] = {{"eps0", th.eps0}, {"eps1", th.eps1},   {"eps2", th.eps2},
                   {"R0", th.R0},     {"r_scan", th.r_scan}, {"nx", c.analysis.nx},
                   {"nt", c.analysis.nt}, {"criterion", to_string(c.analysis.criterion)}};
  j["output_dir"] = c.output_dir;
  return j.dump(indent);
}

std::filesystem::path meta_path(const std::filesystem::path& traj_path) {
  auto p = traj_path;
  p.replace_extension(".meta.json");
  return p;
}

}  // namespace sgm
