#include "quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace sgm::detail {

void Rule::append(const Rule& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

double Rule::integrate(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return s;
}

namespace {

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
const Rule& reference_rule(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    r.x[n - 1 - i] = z;
    r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace

Rule gauss_legendre(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  const Rule& ref = reference_rule(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

Rule composite_gauss(double a, double b, int panels, int n) {
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) r.append(gauss_legendre(a + p * h, a + (p + 1) * h, n));
  return r;
}

void build_spectra(FrameSpectra& s, std::span<const Frame> frames) {
  const std::size_t n = frames.front().u.n_grid();
  const std::size_t half = n / 2;
  s.half = half;
  const auto cols = static_cast<Eigen::Index>(frames.size());
  const auto rows = static_cast<Eigen::Index>(2 * (half + 1));
  for (int d = 0; d < 3; ++d) s.re_im[d] = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index f = 0; f < cols; ++f) {
    const auto c = frames[static_cast<std::size_t>(f)].u.half_coeffs();
    for (std::size_t k = 0; k <= half; ++k) {
      const double kk = static_cast<double>(k);
      Complex v = c[k];
      for (int d = 0; d < 3; ++d) {
        const Complex vd = (d > 0 && k == half) ? Complex{} : v;
        s.re_im[d](static_cast<Eigen::Index>(k), f) = vd.real();
        s.re_im[d](static_cast<Eigen::Index>(half + 1 + k), f) = vd.imag();
        v *= Complex(0.0, kk);
      }
    }
  }
}

Eigen::MatrixXd fourier_basis(std::span<const double> x, std::size_t n_grid) {
  const std::size_t half = n_grid / 2;
  Eigen::MatrixXd b(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(2 * (half + 1)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Complex step = std::polar(1.0, x[i]);
    Complex e(1.0, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
      const double w = (k == 0 || k == half) ? 1.0 : 2.0;
      b(row, static_cast<Eigen::Index>(k)) = w * e.real();
      b(row, static_cast<Eigen::Index>(half + 1 + k)) = -w * e.imag();
      e *= step;
      // Renormalize occasionally against drift in the recurrence.
      if ((k & 31u) == 31u) e = std::polar(1.0, static_cast<double>(k + 1) * x[i]);
    }
  }
  return b;
}

Eigen::VectorXd coeff_column(const SpectralField& f) {
  const auto c = f.half_coeffs();
  const std::size_t half = c.size() - 1;
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * (half + 1)));
  for (std::size_t k = 0; k <= half; ++k) {
    v(static_cast<Eigen::Index>(k)) = c[k].real();
    v(static_cast<Eigen::Index>(half + 1 + k)) = c[k].imag();
  }
  return v;
}

TimeNodes time_nodes(const Trajectory& traj, double ta, double tb, int gauss_per_interval) {
  if (!(tb > ta)) throw std::invalid_argument("empty time window");
  const auto frames = traj.frames();
  const std::size_t nf = frames.size();
  const double eps = 1e-12 * std::max(1.0, std::abs(tb));
  TimeNodes tn;
  auto locate = [&](double t, std::size_t i) {
    if (i + 1 >= nf) i = nf >= 2 ? nf - 2 : 0;
    double theta = 0.0;
    if (nf >= 2) {
      theta = (t - frames[i].t) / (frames[i + 1].t - frames[i].t);
      if (std::abs(theta) < 1e-13) theta = 0.0;
      if (std::abs(theta - 1.0) < 1e-13) theta = 1.0;
    }
    tn.i0.push_back(i);
    tn.theta.push_back(theta);
  };
  std::vector<double> knots{ta};
  for (std::size_t k = 0; k < nf; ++k) {
    const double t = frames[k].t;
    if (t >= ta - eps && t <= tb + eps) ++tn.frames_inside;
    if (t > ta + eps && t < tb - eps) knots.push_back(t);
  }
  knots.push_back(tb);
  if (gauss_per_interval <= 0) {
    for (double t : knots) {
      tn.t.push_back(t);
      locate(t, traj.index_at_or_before(t));
    }
    tn.w.assign(tn.t.size(), 0.0);
    for (std::size_t j = 0; j + 1 < tn.t.size(); ++j) {
      const double h = 0.5 * (tn.t[j + 1] - tn.t[j]);
      tn.w[j] += h;
      tn.w[j + 1] += h;
    }
    return tn;
  }
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const std::size_t i = traj.index_at_or_before(0.5 * (knots[j] + knots[j + 1]));
    const Rule r = gauss_legendre(knots[j], knots[j + 1], gauss_per_interval);
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      tn.t.push_back(r.x[q]);
      tn.w.push_back(r.w[q]);
      locate(r.x[q], i);
    }
  }
  return tn;
}

Eigen::MatrixXd window_coeffs(const Trajectory& traj, int d, const TimeNodes& tn) {
  const Eigen::MatrixXd& s = traj.spectra().re_im[d];
  Eigen::MatrixXd c(s.rows(), static_cast<Eigen::Index>(tn.t.size()));
  for (std::size_t j = 0; j < tn.t.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(tn.i0[j]);
    const double th = tn.theta[j];
    const auto col = static_cast<Eigen::Index>(j);
    if (th == 0.0) {
      c.col(col) = s.col(i);
    } else if (th == 1.0) {
      c.col(col) = s.col(i + 1);
    } else {
      c.col(col) = (1.0 - th) * s.col(i) + th * s.col(i + 1);
    }
  }
  return c;
}

Eigen::MatrixXd sample_window(const Trajectory& traj, int d, const Eigen::MatrixXd& basis, const TimeNodes& tn) {
  return basis * window_coeffs(traj, d, tn);
}

}  // namespace sgm::detail
