#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgm/singular_set.hpp"
#include "sgm/torus_field.hpp"
#include "sgm/trajectory.hpp"

namespace sgm {

// ---- SGT1 trajectory files ----
//
//   "SGT1" + JSON header line + n_frames x n_grid little-endian binary64 samples.
//
// Header keys in order: version, n_grid, tau, n_frames, t0, storage ("real").
// Frame k sits at t0 + k tau. A shortened last step adds a trailing "t_end" key.

struct Sgt1Header {
  int version = 1;
  std::size_t n_grid = 0;
  double tau = 0.0;
  std::size_t n_frames = 0;
  double t0 = 0.0;
  std::string storage = "real";
  std::optional<double> t_end;

  double frame_time(std::size_t k) const;
};

/// Throws BadInput when the frame times are not t0 + k tau (up to a final t_end).
void write_sgt1(std::ostream& os, const Trajectory& traj);
void write_sgt1_file(const std::filesystem::path& path, const Trajectory& traj);

Sgt1Header read_sgt1_header(std::istream& is);
/// `base` supplies the solver settings the file does not carry (nonlinear, dealias, ...).
/// Throws BadInput.
Trajectory read_sgt1(std::istream& is, SolverConfig base = {});
Trajectory read_sgt1_file(const std::filesystem::path& path, SolverConfig base = {});

/// Whether the file starts with the SGT1 magic.
bool is_sgt1_file(const std::filesystem::path& path);

// ---- configuration ----

/// Initial conditions: "mode:k,amp" (amp cos kx), "random:seed,n_modes,amp" (random
/// modes 1..n_modes scaled to RMS amp), "file:path" (whitespace-separated samples,
/// or the last frame of an SGT1 file). Throws BadInput.
SpectralField initial_condition(const std::string& spec, std::size_t n_grid);

struct AnalysisConfig {
  Thresholds thresholds;
  std::size_t nx = 32;  ///< scan grid strides
  std::size_t nt = 9;
  Criterion criterion = Criterion::Y;

  bool operator==(const AnalysisConfig&) const = default;
};

struct RunConfig {
  std::string ic = "mode:1,0.1";
  std::size_t n_grid = 128;
  SolverConfig solver;
  AnalysisConfig analysis;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Missing keys keep their defaults; unknown keys and bad values throw BadInput.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& cfg, int indent = 2);

/// `<dir>/<stem>.meta.json` next to a trajectory file.
std::filesystem::path meta_path(const std::filesystem::path& traj_path);

// ---- verification ----

struct VerifyCheck {
  std::string name;
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

/// Mean-zero frames, the per-step discrete energy identity (inequality on steps
/// that used halving), the per-step scheme residual, and LEI slack on the probe family.
/// `halvings` (per frame) comes from the run metadata when available.
std::vector<VerifyCheck> verify_trajectory(const Trajectory& traj, const std::vector<int>* halvings = nullptr);

// ---- commands ----

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitSolverFailure = 2,
  kExitResolutionFailure = 3,
  kExitBadInput = 4,
};

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::string> ic;
  std::optional<double> tau;
  std::optional<double> t_end;
  std::optional<std::string> out;
};

struct AnalyzeOptions {
  std::filesystem::path traj;
  std::filesystem::path config;
  std::optional<std::string> criterion;
  std::optional<std::string> out;
};

struct CampanatoOptions {
  std::filesystem::path input;
  double p = 3.0;
  double beta = 0.5;
  int alpha = 4;
};

struct DimOptions {
  std::filesystem::path points;
  std::vector<double> deltas;  ///< empty: derived from the point spread
};

/// Writes <out>/trajectory.sgt1 and <out>/trajectory.meta.json.
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
/// Writes <out>/report.json and <out>/cylinder_stats.csv.
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& traj, std::ostream& out, std::ostream& err);
/// JSON fit result on stdout.
int cmd_campanato(const CampanatoOptions& opt, std::ostream& out, std::ostream& err);
/// JSON dimension estimate and cylinder counts on stdout.
int cmd_dim(const DimOptions& opt, std::ostream& out, std::ostream& err);

/// CSV x,t (header optional). Throws BadInput.
std::vector<PlanePoint> read_points_csv(std::istream& is);

}  // namespace sgm
