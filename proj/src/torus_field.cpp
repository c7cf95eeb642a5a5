#include "sgm/torus_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace sgm {

bool valid_grid_size(std::size_t n) { return n >= 16 && (n & (n - 1)) == 0; }

namespace {

void require_grid(std::size_t n) {
  if (!valid_grid_size(n)) {
    throw std::invalid_argument("n_grid must be a power of two >= 16, got " + std::to_string(n));
  }
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (a.n_grid() != b.n_grid()) throw std::invalid_argument("grid size mismatch");
}

}  // namespace

SpectralField SpectralField::from_samples(std::vector<double> samples) {
  require_grid(samples.size());
  SpectralField f;
  f.coeffs_ = detail::forward_fft(samples);
  f.samples_ = std::move(samples);
  return f;
}

SpectralField SpectralField::from_half_coeffs(std::size_t n_grid, std::vector<Complex> half) {
  require_grid(n_grid);
  if (half.size() != n_grid / 2 + 1) throw std::invalid_argument("half spectrum has wrong length");
  // Modes 0 and n/2 of a real field are real.
  half.front() = Complex(half.front().real(), 0.0);
  half.back() = Complex(half.back().real(), 0.0);
  SpectralField f;
  f.samples_ = detail::inverse_fft(half, n_grid);
  f.coeffs_ = std::move(half);
  return f;
}

SpectralField SpectralField::zero(std::size_t n_grid) {
  require_grid(n_grid);
  SpectralField f;
  f.samples_.assign(n_grid, 0.0);
  f.coeffs_.assign(n_grid / 2 + 1, Complex{});
  return f;
}

Complex SpectralField::coeff(long k) const {
  const long half = static_cast<long>(n_grid() / 2);
  if (k < -half || k > half) throw std::out_of_range("wavenumber outside the resolved band");
  return k >= 0 ? coeffs_[static_cast<std::size_t>(k)]
                : std::conj(coeffs_[static_cast<std::size_t>(-k)]);
}

double SpectralField::value_at(double x) const {
  const std::size_t half = n_grid() / 2;
  double v = coeffs_[0].real();
  const Complex step = std::polar(1.0, x);
  Complex e = step;
  for (std::size_t k = 1; k < half; ++k) {
    v += 2.0 * (coeffs_[k] * e).real();
    e *= step;
  }
  v += coeffs_[half].real() * std::cos(static_cast<double>(half) * x);
  return v;
}

double SpectralField::l2_norm() const {
  const std::size_t half = coeffs_.size() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    sum += ((k == 0 || k == half) ? 1.0 : 2.0) * std::norm(coeffs_[k]);
  }
  return std::sqrt(kDomainLength * sum);
}

SpectralField derivative(const SpectralField& f, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("derivative order must be in 0..4");
  if (order == 0) return f;
  auto c = std::vector<Complex>(f.half_coeffs().begin(), f.half_coeffs().end());
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::pow(i * static_cast<double>(k), order);
  c.back() = Complex{};
  return SpectralField::from_half_coeffs(f.n_grid(), std::move(c));
}

double sobolev_norm(const SpectralField& f, NormOrder ord) {
  const auto c = f.half_coeffs();
  const std::size_t half = c.size() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double kk = static_cast<double>(k);
    double w = 0.0;
    if (ord.dotted) {
      w = (k == 0) ? 0.0 : std::pow(kk, 2.0 * ord.s);
    } else {
      w = 1.0 + std::pow(kk, 2.0 * ord.s);  // 0^0 = 1
    }
    // Modes 0 < k < n/2 stand for the pair +-k.
    const double mult = (k == 0 || k == half) ? 1.0 : 2.0;
    sum += mult * w * std::norm(c[k]);
  }
  return std::sqrt(kDomainLength * sum);
}

double interpolation_gap(const SpectralField& f, double s1, double s2, double theta) {
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta must lie in [0, 1]");
  const double s = theta * s1 + (1.0 - theta) * s2;
  const double n1 = sobolev_norm(f, {s1, false});
  if (n1 == 0.0) return 0.0;
  if (theta == 1.0) return 0.0;
  const double n2 = sobolev_norm(f, {s2, false});
  const double ns = sobolev_norm(f, {s, false});
  return std::pow(n1, theta) * std::pow(n2, 1.0 - theta) - ns;
}

long dealias_cutoff(std::size_t n_grid) { return static_cast<long>((n_grid - 1) / 3); }

SpectralField sgm_nonlinearity(const SpectralField& f, bool dealias) {
  const std::size_t n = f.n_grid();
  const long cutoff = dealias ? dealias_cutoff(n) : static_cast<long>(n / 2);
  auto c = std::vector<Complex>(f.half_coeffs().begin(), f.half_coeffs().end());
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = static_cast<long>(k) <= cutoff ? i * static_cast<double>(k) * c[k] : Complex{};
  }
  c.back() = Complex{};
  const auto ux = SpectralField::from_half_coeffs(n, std::move(c));
  std::vector<double> sq(ux.samples().begin(), ux.samples().end());
  for (auto& v : sq) v *= v;
  auto p = detail::forward_fft(sq);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double kk = static_cast<double>(k);
    p[k] = static_cast<long>(k) <= cutoff ? -kk * kk * p[k] : Complex{};
  }
  p.front() = Complex{};
  p.back() = Complex{};
  return SpectralField::from_half_coeffs(n, std::move(p));
}

SpectralField refine(const SpectralField& f, std::size_t n_fine) {
  require_grid(n_fine);
  if (n_fine < f.n_grid()) throw std::invalid_argument("refine target must not be coarser");
  std::vector<Complex> c(n_fine / 2 + 1, Complex{});
  const auto src = f.half_coeffs();
  const std::size_t half = f.n_grid() / 2;
  for (std::size_t k = 0; k < half; ++k) c[k] = src[k];
  // The coarse Nyquist cosine splits evenly between +-n/2 on the finer grid.
  if (n_fine > f.n_grid()) {
    c[half] = 0.5 * src[half];
  } else {
    c[half] = src[half];
  }
  return SpectralField::from_half_coeffs(n_fine, std::move(c));
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.samples().begin(), a.samples().end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += b.samples()[j];
  return SpectralField::from_samples(std::move(v));
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.samples().begin(), a.samples().end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= b.samples()[j];
  return SpectralField::from_samples(std::move(v));
}

SpectralField operator*(double s, const SpectralField& a) {
  std::vector<Complex> c(a.half_coeffs().begin(), a.half_coeffs().end());
  for (auto& x : c) x *= s;
  return SpectralField::from_half_coeffs(a.n_grid(), std::move(c));
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t j = 0; j < a.n_grid(); ++j) m = std::max(m, std::abs(a.samples()[j] - b.samples()[j]));
  return m;
}

}  // namespace sgm
