#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sgm/torus_field.hpp"

namespace sgm {

/// Implicit Euler configuration. Times are in the units of t in u_t + u_xxxx + (u_x^2)_xx = 0.
struct SolverConfig {
  double tau = 1e-3;
  double t_end = 1.0;
  /// Relative L2 change and weak-residual stopping tolerance of the Picard loop.
  double picard_tol = 1e-12;
  int picard_max_iter = 200;
  int step_halving_max = 8;
  bool dealias = true;
  /// false evolves the pure biharmonic heat flow u_t = -u_xxxx.
  bool nonlinear = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

enum class Interpolant {
  PiecewiseConstant,  ///< u_bar: equals u_k on ((k-1)tau, k tau]
  PiecewiseLinear,    ///< u^tau: linear between neighbouring frames
};

struct Frame {
  double t = 0.0;
  SpectralField u;
};

namespace detail {
struct FrameSpectra;
}

/// Time-ordered frames u_k of one run. Immutable; safe to share between threads.
class Trajectory {
 public:
  /// Frames must be strictly increasing in time and mean-zero, all on one grid.
  /// `dissipation[k]` is the discrete dissipation accumulated between frames k-1 and k;
  /// when omitted it is taken as (t_k - t_{k-1}) ||u_k,xx||^2.
  Trajectory(SolverConfig config, std::vector<Frame> frames, std::vector<double> dissipation = {});

  const SolverConfig& config() const { return config_; }
  std::span<const Frame> frames() const { return frames_; }
  const Frame& frame(std::size_t k) const { return frames_.at(k); }
  std::size_t size() const { return frames_.size(); }
  std::size_t n_grid() const { return frames_.front().u.n_grid(); }
  double t_begin() const { return frames_.front().t; }
  double t_end() const { return frames_.back().t; }
  bool nonlinear() const { return config_.nonlinear; }
  std::span<const double> dissipation() const { return dissipation_; }

  /// Reconstruct the field at time t from the stored frames.
  SpectralField at(double t, Interpolant kind = Interpolant::PiecewiseLinear) const;

  /// Largest k with t_k <= t (clamped to the valid range).
  std::size_t index_at_or_before(double t) const;

  /// Spectra of u, u_x, u_xx per frame, built on first use.
  const detail::FrameSpectra& spectra() const;

 private:
  SolverConfig config_;
  std::vector<Frame> frames_;
  std::vector<double> dissipation_;
  std::shared_ptr<detail::FrameSpectra> spectra_;
};

}  // namespace sgm
