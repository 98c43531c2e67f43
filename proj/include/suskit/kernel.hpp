#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace suskit {

enum class Singularity { none, inverse_at_zero };

/// Symmetric non-negative kernel kappa(x,y) plus metadata consumed by
/// mesh selection and the graph samplers. Pure evaluation object:
/// discretization lives elsewhere, so one kernel serves many meshes and
/// the exact-evaluation samplers.
struct Kernel {
  std::function<double(double, double)> evaluate;
  std::string name;
  std::optional<double> bound;  // sup kappa when finite
  Singularity singularity = Singularity::none;
  std::set<std::string> closed_form_tags;

  /// True when kappa(x,y) = phi(max(x,y)); such kernels admit fast
  /// column-constant edge sampling on sorted types.
  std::function<double(double)> max_profile;  // phi, when applicable

  double operator()(double x, double y) const { return evaluate(x, y); }
};

/// kappa == c: the Erdos-Renyi case on any probability space.
inline Kernel constant_kernel(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant_kernel: c must be > 0");
  Kernel k;
  k.evaluate = [c](double, double) { return c; };
  k.name = "constant:" + std::to_string(c);
  k.bound = c;
  k.closed_form_tags = {"chi_sub", "chi_hat", "rho_k", "lambda_c"};
  k.max_profile = [c](double) { return c; };
  return k;
}

/// kappa(x,y) = psi(x) psi(y).
inline Kernel rank1_kernel(std::function<double(double)> psi, const std::string& psi_name,
                           std::optional<double> psi_bound = std::nullopt) {
  Kernel k;
  auto p = std::move(psi);
  k.evaluate = [p](double x, double y) { return p(x) * p(y); };
  k.name = "rank1:psi=" + psi_name;
  if (psi_bound) k.bound = (*psi_bound) * (*psi_bound);
  k.closed_form_tags = {"chi_sub", "chi_hat", "lambda_c"};
  return k;
}

/// CHKNS limit kernel 1/(x v y) - 1 on (0,1].
inline Kernel chkns_kernel() {
  Kernel k;
  k.evaluate = [](double x, double y) {
    const double m = std::max(x, y);
    if (m <= 0.0) throw std::domain_error("chkns kernel: max(x,y) must be > 0");
    return 1.0 / m - 1.0;
  };
  k.name = "chkns";
  k.singularity = Singularity::inverse_at_zero;
  k.closed_form_tags = {"chi_sub", "chi_hat", "rho_k", "lambda_c"};
  k.max_profile = [](double m) { return 1.0 / m - 1.0; };
  return k;
}

/// Dubins kernel 1/(x v y) on (0,1].
inline Kernel dubins_kernel() {
  Kernel k;
  k.evaluate = [](double x, double y) {
    const double m = std::max(x, y);
    if (m <= 0.0) throw std::domain_error("dubins kernel: max(x,y) must be > 0");
    return 1.0 / m;
  };
  k.name = "dubins";
  k.singularity = Singularity::inverse_at_zero;
  k.closed_form_tags = {"chi_sub", "rho_k", "lambda_c"};
  k.max_profile = [](double m) { return 1.0 / m; };
  return k;
}

/// kappa(x,y) = phi(max(x,y)) for a supplied profile on (0,1].
inline Kernel max_kernel(std::function<double(double)> phi, const std::string& phi_name,
                         std::optional<double> phi_bound = std::nullopt) {
  Kernel k;
  auto p = std::move(phi);
  k.evaluate = [p](double x, double y) { return p(std::max(x, y)); };
  k.name = "max:phi=" + phi_name;
  k.bound = phi_bound;
  k.closed_form_tags = {"chi_sub", "lambda_c"};
  k.max_profile = p;
  return k;
}

/// Finite-type kernel given by a symmetric non-negative matrix; type
/// coordinates are the atom labels 1..n of a finite TypeSpace.
inline Kernel finite_kernel(const std::vector<std::vector<double>>& matrix) {
  const std::size_t n = matrix.size();
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw std::invalid_argument("finite_kernel: matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i][j] < 0.0) throw std::invalid_argument("finite_kernel: entries must be >= 0");
      if (matrix[i][j] != matrix[j][i])
        throw std::invalid_argument("finite_kernel: matrix must be symmetric");
      bound = std::max(bound, matrix[i][j]);
    }
  }
  Kernel k;
  k.evaluate = [matrix, n](double x, double y) {
    const auto i = static_cast<std::size_t>(std::lround(x)) - 1;
    const auto j = static_cast<std::size_t>(std::lround(y)) - 1;
    if (i >= n || j >= n) throw std::domain_error("finite_kernel: type out of range");
    return matrix[i][j];
  };
  k.name = "finite:" + std::to_string(n);
  k.bound = bound;
  k.closed_form_tags = {"lambda_c"};
  return k;
}

/// Pointwise scaling lambda * kappa.
inline Kernel scale(const Kernel& k, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale: lambda must be > 0");
  Kernel s;
  auto base = k.evaluate;
  s.evaluate = [base, lambda](double x, double y) { return lambda * base(x, y); };
  s.name = k.name + "*" + std::to_string(lambda);
  if (k.bound) s.bound = *k.bound * lambda;
  s.singularity = k.singularity;
  s.closed_form_tags = k.closed_form_tags;
  if (k.max_profile) {
    auto prof = k.max_profile;
    s.max_profile = [prof, lambda](double m) { return lambda * prof(m); };
  }
  return s;
}

}  // namespace suskit
