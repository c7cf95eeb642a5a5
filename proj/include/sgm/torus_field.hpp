#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace sgm {

using Complex = std::complex<double>;

/// Circumference of the torus. Wavenumbers are integers.
inline constexpr double kDomainLength = 2.0 * std::numbers::pi;

/// Scale between the spectral seminorm and the L2 norm of the derivative:
/// ||f||_{H^s dotted} = kSeminormScale * ||d^s f / dx^s|| for integer s.
/// The Parseval factor 2*pi is folded into sobolev_norm, so this is exactly 1.
inline constexpr double kSeminormScale = 1.0;

/// Sobolev order of a (semi)norm. `dotted` excludes the k = 0 mode and uses
/// the weight |k|^{2s}; the full norm uses 1 + |k|^{2s}.
struct NormOrder {
  double s = 0.0;
  bool dotted = true;
};

/// A real periodic function on [0, 2*pi), held both as n equispaced samples
/// x_j = 2*pi*j/n and as Fourier coefficients
///
///   f_hat(k) = (1/2pi) int f(x) exp(-ikx) dx,
///
/// for k = 0 .. n/2 (negative modes follow from conjugate symmetry).
/// Immutable after construction.
class SpectralField {
 public:
  SpectralField() = default;

  /// n must be a power of two >= 16.
  static SpectralField from_samples(std::vector<double> samples);
  static SpectralField from_half_coeffs(std::size_t n_grid, std::vector<Complex> half);
  static SpectralField zero(std::size_t n_grid);

  template <class F>
  static SpectralField from_function(std::size_t n_grid, F&& f) {
    std::vector<double> v(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j) v[j] = f(grid_point(n_grid, j));
    return from_samples(std::move(v));
  }

  static double grid_point(std::size_t n_grid, std::size_t j) {
    return kDomainLength * static_cast<double>(j) / static_cast<double>(n_grid);
  }

  std::size_t n_grid() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  /// Coefficients for k = 0 .. n/2.
  std::span<const Complex> half_coeffs() const { return coeffs_; }
  /// f_hat(k) for -n/2 <= k <= n/2.
  Complex coeff(long k) const;

  double mean() const { return coeffs_.empty() ? 0.0 : coeffs_[0].real(); }
  bool is_mean_zero(double tol = 1e-13) const { return std::abs(mean()) < tol; }

  /// Trigonometric interpolant evaluated at an arbitrary x.
  double value_at(double x) const;

  /// ||f||_{L2(T)}.
  double l2_norm() const;

 private:
  std::vector<double> samples_;
  std::vector<Complex> coeffs_;
};

/// Whether n is an admissible grid size.
bool valid_grid_size(std::size_t n);

/// Spectral derivative of order 0..4: g_hat(k) = (ik)^order f_hat(k).
/// For order >= 1 the unpaired Nyquist mode is dropped, so that repeated
/// first derivatives agree with higher-order ones.
SpectralField derivative(const SpectralField& f, int order);

/// (2*pi * sum_k w(k) |f_hat(k)|^2)^{1/2}, w(k) = |k|^{2s} (dotted) or 1 + |k|^{2s}.
double sobolev_norm(const SpectralField& f, NormOrder ord);

/// ||f||_{H^s1}^theta ||f||_{H^s2}^{1-theta} - ||f||_{H^s}, s = theta*s1 + (1-theta)*s2,
/// with full (non-dotted) norms. Returns 0 for the zero field.
double interpolation_gap(const SpectralField& f, double s1, double s2, double theta);

/// d_xx ((d_x f)^2). With `dealias` the quadratic product uses 2/3-rule
/// truncation: modes |k| > dealias_cutoff(n) are removed from f_x and from the
/// product, which makes the product exact on the retained band.
SpectralField sgm_nonlinearity(const SpectralField& f, bool dealias = true);

/// Largest retained wavenumber under the 2/3 rule: 3K < n.
long dealias_cutoff(std::size_t n_grid);

/// Spectral (zero-padding) resampling onto a finer or equal grid.
SpectralField refine(const SpectralField& f, std::size_t n_fine);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);

/// Pointwise maximum of |f - g| on the grid.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

}  // namespace sgm
