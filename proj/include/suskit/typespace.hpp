#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace suskit {

/// Discretized measure space (S, mu): weighted point set supporting
/// quadrature. Immutable after construction; integral operators on it
/// become matrices.
struct TypeSpace {
  std::vector<double> points;   // type coordinates x_i
  std::vector<double> weights;  // positive cell masses w_i
  double total_mass = 0.0;      // sum of weights
  std::string description;

  std::size_t size() const { return points.size(); }
};

namespace detail {

inline TypeSpace make_space(std::vector<double> pts, std::vector<double> w,
                            std::string desc) {
  TypeSpace ts;
  ts.points = std::move(pts);
  ts.weights = std::move(w);
  ts.description = std::move(desc);
  double mass = 0.0;
  for (double wi : ts.weights) {
    if (!(wi > 0.0)) throw std::invalid_argument("TypeSpace: weights must be positive");
    mass += wi;
  }
  ts.total_mass = mass;
  return ts;
}

/// Midpoint cells from monotone boundaries b_0 < ... < b_m. Weights
/// are the cell lengths, so the total mass telescopes to b_m - b_0;
/// that exact value is recorded rather than the float accumulation.
inline TypeSpace mesh_from_boundaries(const std::vector<double>& b, std::string desc) {
  const std::size_t m = b.size() - 1;
  std::vector<double> pts(m), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    pts[i] = 0.5 * (b[i] + b[i + 1]);
    w[i] = b[i + 1] - b[i];
  }
  TypeSpace ts = make_space(std::move(pts), std::move(w), std::move(desc));
  ts.total_mass = b[m] - b[0];
  return ts;
}

}  // namespace detail

/// Mesh on (0,1] with cell boundaries (i/m)^gamma, concentrating
/// resolution near 0 where the CHKNS/Dubins kernels blow up.
inline TypeSpace build_graded_mesh(std::size_t m, double gamma) {
  if (m == 0) throw std::invalid_argument("build_graded_mesh: m must be >= 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("build_graded_mesh: gamma must be >= 1");
  std::vector<double> b(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    b[i] = std::pow(static_cast<double>(i) / static_cast<double>(m), gamma);
  std::ostringstream desc;
  desc << "graded(0,1] m=" << m << " gamma=" << gamma;
  return detail::mesh_from_boundaries(b, desc.str());
}

/// Midpoint quadrature of Lebesgue measure on (0,1] with m equal
/// cells; identical to build_graded_mesh(m, 1).
inline TypeSpace build_uniform_mesh(std::size_t m) {
  if (m == 0) throw std::invalid_argument("build_uniform_mesh: m must be >= 1");
  TypeSpace ts = build_graded_mesh(m, 1.0);
  ts.description = "uniform(0,1] m=" + std::to_string(m);
  return ts;
}

/// Truncated power-law space: [1, x_max] with d mu = q x^{-q-1} dx,
/// geometric cell boundaries, exact cell masses a^{-q} - b^{-q}. The
/// truncation deficit x_max^{-q} is recorded in the description so it
/// stays visible.
inline TypeSpace build_powerlaw_space(double q, double x_max, std::size_t m) {
  if (!(q > 1.0)) throw std::invalid_argument("build_powerlaw_space: q must be > 1");
  if (!(x_max > 1.0)) throw std::invalid_argument("build_powerlaw_space: x_max must be > 1");
  if (m == 0) throw std::invalid_argument("build_powerlaw_space: m must be >= 1");
  std::vector<double> pts(m), w(m);
  const double step = std::log(x_max) / static_cast<double>(m);
  double a = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double b = i + 1 == m ? x_max : std::exp(step * static_cast<double>(i + 1));
    pts[i] = 0.5 * (a + b);
    w[i] = std::pow(a, -q) - std::pow(b, -q);  // exact cell mass
    a = b;
  }
  std::ostringstream desc;
  desc << "powerlaw[1," << x_max << "] q=" << q << " m=" << m
       << " truncation_deficit=" << std::pow(x_max, -q);
  TypeSpace ts = detail::make_space(std::move(pts), std::move(w), desc.str());
  ts.total_mass = 1.0 - std::pow(x_max, -q);  // telescoped exactly
  return ts;
}

/// Finite atomic space: points are atom labels 1..n, weights the
/// supplied masses.
inline TypeSpace build_finite_space(const std::vector<double>& masses) {
  if (masses.empty()) throw std::invalid_argument("build_finite_space: masses must be non-empty");
  std::vector<double> pts(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) pts[i] = static_cast<double>(i + 1);
  return detail::make_space(std::move(pts), masses, "finite n=" + std::to_string(masses.size()));
}

/// Quadrature: sum_i w_i f(x_i).
inline double integrate(const TypeSpace& ts, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = f(ts.points[i]);
    if (!std::isfinite(v))
      throw std::domain_error("integrate: non-finite integrand at x=" + std::to_string(ts.points[i]));
    acc += ts.weights[i] * v;
  }
  return acc;
}

/// Two-column CSV (point, weight) after a one-line header carrying the
/// total mass and description.
inline void write_csv(const TypeSpace& ts, std::ostream& os) {
  os.precision(17);
  os << "# total_mass=" << ts.total_mass << " description=" << ts.description << "\n";
  os << "point,weight\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    os << ts.points[i] << "," << ts.weights[i] << "\n";
}

}  // namespace suskit
