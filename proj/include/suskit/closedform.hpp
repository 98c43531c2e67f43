#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "suskit/typespace.hpp"

namespace suskit::closedform {

// ----- Erdos-Renyi (constant kernel on a probability space) -----

/// Survival probability: maximal root of rho = 1 - exp(-lambda rho),
/// found by monotone iteration from 1; zero at or below criticality.
inline double er_rho(double lambda, double tol = 1e-15) {
  if (!(lambda > 0.0)) throw std::invalid_argument("er_rho: lambda must be > 0");
  if (lambda <= 1.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double next = 1.0 - std::exp(-lambda * r);
    if (std::abs(next - r) < tol) return next;
    r = next;
  }
  return r;
}

/// chi = 1/(1-lambda); diverges at and above criticality.
inline std::optional<double> er_chi(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("er_chi: lambda must be > 0");
  if (lambda >= 1.0) return std::nullopt;
  return 1.0 / (1.0 - lambda);
}

/// chi_hat: equals chi below criticality, (1-rho)/(1-lambda(1-rho))
/// above; diverges exactly at lambda = 1.
inline std::optional<double> er_chi_hat(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("er_chi_hat: lambda must be > 0");
  if (lambda < 1.0) return 1.0 / (1.0 - lambda);
  if (lambda == 1.0) return std::nullopt;
  const double q = 1.0 - er_rho(lambda);
  return q / (1.0 - lambda * q);
}

/// Borel law for Poisson branching total progeny:
/// rho_k = k^{k-1}/k! lambda^{k-1} e^{-k lambda}, in log space.
inline double er_borel_rhok(double lambda, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("er_borel_rhok: k must be >= 1");
  const double kd = static_cast<double>(k);
  const double log_p = (kd - 1.0) * std::log(kd) - std::lgamma(kd + 1.0) +
                       (kd - 1.0) * std::log(lambda) - kd * lambda;
  return std::exp(log_p);
}

// ----- Rank 1: kappa(x,y) = psi(x) psi(y) -----

/// Subcritical chi from the psi moments: 1 + lambda (int psi)^2 / (1 - lambda int psi^2).
inline std::optional<double> rank1_chi_sub(double int_psi, double int_psi2, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rank1_chi_sub: lambda must be > 0");
  if (lambda * int_psi2 >= 1.0) return std::nullopt;
  return 1.0 + lambda * int_psi * int_psi / (1.0 - lambda * int_psi2);
}

/// lambda as a function of the supercritical parameter xi:
/// lambda = xi / int (1 - e^{-xi psi}) psi d mu.
inline double rank1_xi_to_lambda(const std::function<double(double)>& psi, const TypeSpace& ts,
                                 double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("rank1_xi_to_lambda: xi must be > 0");
  const double den = integrate(ts, [&](double x) {
    const double p = psi(x);
    return (1.0 - std::exp(-xi * p)) * p;
  });
  return xi / den;
}

/// Inverse map lambda -> xi by bisection; lambda(xi) is strictly
/// increasing, so the root is unique. Requires lambda above the
/// critical value 1 / int psi^2.
inline double rank1_lambda_to_xi(const std::function<double(double)>& psi, const TypeSpace& ts,
                                 double lambda, double tol = 1e-12) {
  const double int_psi2 = integrate(ts, [&](double x) { const double p = psi(x); return p * p; });
  if (!(lambda > 1.0 / int_psi2))
    throw std::invalid_argument("rank1_lambda_to_xi: lambda must exceed lambda_c");
  double lo = 0.0, hi = 1.0;
  while (rank1_xi_to_lambda(psi, ts, hi) < lambda) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("rank1_lambda_to_xi: xi bracket blew up");
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (rank1_xi_to_lambda(psi, ts, mid) < lambda)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Rank1ChiHat {
  double value = 0.0;
  double xi = 0.0;
  bool near_critical = false;  // denominator underflow risk
};

/// Supercritical chi_hat:
/// int e^{-xi psi} + xi (int e^{-xi psi} psi)^2 / int (1 - e^{-xi psi}(1 + xi psi)) psi.
inline Rank1ChiHat rank1_chi_hat(const std::function<double(double)>& psi, const TypeSpace& ts,
                                 double lambda, double tol = 1e-12) {
  Rank1ChiHat out;
  out.xi = rank1_lambda_to_xi(psi, ts, lambda, tol);
  const double xi = out.xi;
  const double a = integrate(ts, [&](double x) { return std::exp(-xi * psi(x)); });
  const double b = integrate(ts, [&](double x) {
    const double p = psi(x);
    return std::exp(-xi * p) * p;
  });
  const double den = integrate(ts, [&](double x) {
    const double p = psi(x);
    return (1.0 - std::exp(-xi * p) * (1.0 + xi * p)) * p;
  });
  out.near_critical = !(den > 1e-280);
  out.value = out.near_critical ? std::numeric_limits<double>::infinity()
                                : a + xi * b * b / den;
  return out;
}

// ----- CHKNS: kappa = 1/(x v y) - 1 on (0,1] -----

/// Subcritical/critical chi = (1 - sqrt(1-4 lambda))/(2 lambda).
inline std::optional<double> chkns_chi(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("chkns_chi: lambda must be > 0");
  if (lambda > 0.25) return std::nullopt;
  return (1.0 - std::sqrt(1.0 - 4.0 * lambda)) / (2.0 * lambda);
}

/// chi_hat: the subcritical branch up to 1/4, then 1/lambda. Jumps
/// from 2 to 4 across the critical point.
inline double chkns_chi_hat(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("chkns_chi_hat: lambda must be > 0");
  if (lambda <= 0.25) return (1.0 - std::sqrt(1.0 - 4.0 * lambda)) / (2.0 * lambda);
  return 1.0 / lambda;
}

/// Quadratic recursion for the total probabilities rho_k:
/// rho_k = k lambda / (2 (1 + k lambda)) * sum_{j<k} rho_{k-j} rho_j,
/// rho_1 = 1/(1+lambda). Returns rho_1..rho_K (index k-1).
inline std::vector<double> chkns_rhok_recursion(double lambda, std::size_t K) {
  if (K < 1) throw std::invalid_argument("chkns_rhok_recursion: K must be >= 1");
  std::vector<double> rho(K);
  rho[0] = 1.0 / (1.0 + lambda);
  for (std::size_t k = 2; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j < k; ++j) s += rho[k - j - 1] * rho[j - 1];
    const double kd = static_cast<double>(k);
    rho[k - 1] = kd * lambda / (2.0 * (1.0 + kd * lambda)) * s;
  }
  return rho;
}

struct OdeRho {
  double rho = 0.0;
  bool stable = true;  // false when the integration ran into G -> 1
};

/// Survival probability via the generating-function ODE
/// G'(z) = (z - G)/(lambda z (1 - G)), integrated by RK4 from
/// z0 = 1e-4 with the series start G(z0) = rho_1 z0 + rho_2 z0^2;
/// rho = 1 - G(1). Returns 0 below criticality.
inline OdeRho chkns_rho_via_ode(double lambda, double step = 1e-4) {
  if (!(lambda > 0.0)) throw std::invalid_argument("chkns_rho_via_ode: lambda must be > 0");
  OdeRho out;
  if (lambda <= 0.25) return out;
  const double rho1 = 1.0 / (1.0 + lambda);
  const double rho2 = lambda / ((1.0 + lambda) * (1.0 + lambda) * (1.0 + 2.0 * lambda));
  double z = 1e-4;
  double g = rho1 * z + rho2 * z * z;
  const auto deriv = [lambda](double zz, double gg) {
    return (zz - gg) / (lambda * zz * (1.0 - gg));
  };
  const auto n_steps = static_cast<std::size_t>(std::ceil((1.0 - z) / step));
  const double h = (1.0 - z) / static_cast<double>(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) {
    if (g >= 1.0 - 1e-12) {
      out.stable = false;
      break;
    }
    const double k1 = deriv(z, g);
    const double k2 = deriv(z + 0.5 * h, g + 0.5 * h * k1);
    const double k3 = deriv(z + 0.5 * h, g + 0.5 * h * k2);
    const double k4 = deriv(z + h, g + h * k3);
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    z += h;
  }
  out.rho = 1.0 - g;
  return out;
}

struct PointwiseSolution {
  double alpha_plus = 0.0;
  std::function<double(double)> f;  // x -> x^{alpha_+ - 1}
  double integral = 0.0;            // 1/alpha_+, equals chkns_chi
};

/// Minimal non-negative solution of f = T f + 1 for (sub)critical
/// CHKNS: f(x) = x^{alpha_+ - 1} with alpha_+ = 1/2 + sqrt(1/4 - lambda).
inline PointwiseSolution chkns_chi_solution_pointwise(double lambda) {
  if (!(lambda > 0.0 && lambda <= 0.25))
    throw std::invalid_argument(
        "chkns_chi_solution_pointwise: lambda must be in (0, 1/4] "
        "(supercritical solutions oscillate and are not non-negative)");
  PointwiseSolution out;
  out.alpha_plus = 0.5 + std::sqrt(0.25 - lambda);
  const double e = out.alpha_plus - 1.0;
  out.f = [e](double x) { return std::pow(x, e); };
  out.integral = 1.0 / out.alpha_plus;
  return out;
}

// ----- Dubins: kappa = 1/(x v y) on (0,1] -----

/// chi = (1 - 2 lambda - sqrt(1 - 4 lambda)) / (2 lambda^2) up to 1/4
/// (value 4 at the critical point); no supercritical closed form.
inline std::optional<double> dubins_chi(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dubins_chi: lambda must be > 0");
  if (lambda > 0.25) return std::nullopt;
  return (1.0 - 2.0 * lambda - std::sqrt(1.0 - 4.0 * lambda)) / (2.0 * lambda * lambda);
}

/// Closed forms for rho_1..rho_3.
inline double dubins_rhok(double lambda, std::size_t k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dubins_rhok: lambda must be > 0");
  const double l = lambda;
  switch (k) {
    case 1: return std::exp(-l) / (1.0 + l);
    case 2: return 2.0 * l * std::exp(-2.0 * l) / ((1.0 + l) * (1.0 + 2.0 * l));
    case 3:
      return (15.0 * l * l + 18.0 * l * l * l) * std::exp(-3.0 * l) /
             (2.0 * (1.0 + l) * (1.0 + l) * (1.0 + 2.0 * l) * (1.0 + 3.0 * l));
    default:
      throw std::invalid_argument("dubins_rhok: closed forms exist only for k <= 3");
  }
}

// ----- kappa(x,y) = phi(max(x,y)): Sturm-Liouville route -----

struct SturmLiouvilleChi {
  std::optional<double> chi;
  bool subcritical = false;
  double scaling_constant = 0.0;  // c = 1/(F~'(1) - lambda phi(1) F~(1))
};

/// chi by solving F'' = lambda phi' F with F(0) = 0,
/// F'(1) = lambda phi(1) F(1) + 1: integrate the IVP F~(0)=0, F~'(0)=1
/// by RK4, scale by c, and read off chi = c F~(1). A non-positive c or
/// a sign change of F' means the lambda is past criticality and the
/// route yields no non-negative solution.
inline SturmLiouvilleChi maxkernel_chi_ode(const std::function<double(double)>& phi,
                                           const std::function<double(double)>& dphi,
                                           double lambda, double step = 1e-4) {
  if (!(lambda > 0.0)) throw std::invalid_argument("maxkernel_chi_ode: lambda must be > 0");
  const auto n_steps = static_cast<std::size_t>(std::ceil(1.0 / step));
  const double h = 1.0 / static_cast<double>(n_steps);
  double x = 0.0, F = 0.0, Fp = 1.0;
  bool fp_sign_change = false;  // F~' dipping below 0 breaks f = cF' >= 0
  const auto acc = [&](double xx, double ff) { return lambda * dphi(xx) * ff; };
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double k1F = Fp, k1P = acc(x, F);
    const double k2F = Fp + 0.5 * h * k1P, k2P = acc(x + 0.5 * h, F + 0.5 * h * k1F);
    const double k3F = Fp + 0.5 * h * k2P, k3P = acc(x + 0.5 * h, F + 0.5 * h * k2F);
    const double k4F = Fp + h * k3P, k4P = acc(x + h, F + h * k3F);
    F += h / 6.0 * (k1F + 2.0 * k2F + 2.0 * k3F + k4F);
    Fp += h / 6.0 * (k1P + 2.0 * k2P + 2.0 * k3P + k4P);
    x += h;
    if (Fp < 0.0) fp_sign_change = true;
  }
  SturmLiouvilleChi out;
  const double denom = Fp - lambda * phi(1.0) * F;
  out.scaling_constant = (denom != 0.0) ? 1.0 / denom : std::numeric_limits<double>::infinity();
  if (denom <= 0.0 || fp_sign_change) {
    out.subcritical = false;
    return out;
  }
  out.subcritical = true;
  out.chi = out.scaling_constant * F;
  return out;
}

/// lambda_c by bisection on the sign of the scaling-constant
/// denominator F~'(1) - lambda phi(1) F~(1).
inline double maxkernel_lambda_c(const std::function<double(double)>& phi,
                                 const std::function<double(double)>& dphi, double lo, double hi,
                                 double tol = 1e-6, double step = 1e-4) {
  const auto denom_positive = [&](double lambda) {
    const SturmLiouvilleChi r = maxkernel_chi_ode(phi, dphi, lambda, step);
    return r.subcritical;
  };
  if (!denom_positive(lo)) throw std::invalid_argument("maxkernel_lambda_c: lo not subcritical");
  if (denom_positive(hi)) throw std::invalid_argument("maxkernel_lambda_c: hi not supercritical");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (denom_positive(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace suskit::closedform
