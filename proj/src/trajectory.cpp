#include "sgm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"

namespace sgm {

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (!(tau < t_end)) throw std::invalid_argument("tau must be smaller than t_end");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be positive");
  if (picard_max_iter < 1) throw std::invalid_argument("picard_max_iter must be positive");
  if (step_halving_max < 0) throw std::invalid_argument("step_halving_max must be nonnegative");
}

Trajectory::Trajectory(SolverConfig config, std::vector<Frame> frames, std::vector<double> dissipation)
    : config_(config), frames_(std::move(frames)), dissipation_(std::move(dissipation)),
      spectra_(std::make_shared<detail::FrameSpectra>()) {
  if (frames_.empty()) throw std::invalid_argument("trajectory needs at least one frame");
  const std::size_t n = frames_.front().u.n_grid();
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    if (frames_[k].u.n_grid() != n) throw std::invalid_argument("frames on different grids");
    if (k > 0 && !(frames_[k].t > frames_[k - 1].t)) {
      throw std::invalid_argument("frame times must be strictly increasing (frame " + std::to_string(k) + ")");
    }
  }
  if (dissipation_.empty()) {
    dissipation_.assign(frames_.size(), 0.0);
    for (std::size_t k = 1; k < frames_.size(); ++k) {
      const double s = sobolev_norm(frames_[k].u, {2.0, true});
      dissipation_[k] = (frames_[k].t - frames_[k - 1].t) * s * s;
    }
  } else if (dissipation_.size() != frames_.size()) {
    throw std::invalid_argument("dissipation series has wrong length");
  }
}

std::size_t Trajectory::index_at_or_before(double t) const {
  auto it = std::upper_bound(frames_.begin(), frames_.end(), t,
                             [](double v, const Frame& f) { return v < f.t; });
  if (it == frames_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(frames_.begin(), it) - 1);
}

SpectralField Trajectory::at(double t, Interpolant kind) const {
  if (t <= t_begin()) return frames_.front().u;
  if (t >= t_end()) return frames_.back().u;
  const std::size_t i = index_at_or_before(t);
  if (frames_[i].t == t) return frames_[i].u;
  if (kind == Interpolant::PiecewiseConstant) return frames_[i + 1].u;
  const double theta = (t - frames_[i].t) / (frames_[i + 1].t - frames_[i].t);
  return (1.0 - theta) * frames_[i].u + theta * frames_[i + 1].u;
}

const detail::FrameSpectra& Trajectory::spectra() const {
  std::call_once(spectra_->built, [this] { detail::build_spectra(*spectra_, frames_); });
  return *spectra_;
}

}  // namespace sgm
