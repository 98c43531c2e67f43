#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "suskit/kernel.hpp"
#include "suskit/rng.hpp"
#include "suskit/typespace.hpp"

namespace suskit {

/// Quadrature-matrix realization of the integral operator T_kappa on a
/// TypeSpace: (T f)(x_i) ~ sum_j K(i,j) w_j f(x_j). Immutable after
/// construction; the symmetrized matrix sqrt(w_i) K sqrt(w_j) shares
/// the spectrum of K diag(w) and is built lazily for spectral work.
class DiscreteOperator {
 public:
  DiscreteOperator(Eigen::MatrixXd kernel_matrix, Eigen::VectorXd weights)
      : K_(std::move(kernel_matrix)), w_(std::move(weights)) {
    if (K_.rows() != K_.cols() || K_.rows() != w_.size())
      throw std::invalid_argument("DiscreteOperator: shape mismatch");
    total_mass_ = w_.sum();
  }

  Eigen::Index size() const { return w_.size(); }
  const Eigen::MatrixXd& kernel_matrix() const { return K_; }
  const Eigen::VectorXd& weights() const { return w_; }
  double total_mass() const { return total_mass_; }

  const Eigen::MatrixXd& symmetric_form() const {
    if (!S_) {
      Eigen::VectorXd s = w_.cwiseSqrt();
      S_ = s.asDiagonal() * K_ * s.asDiagonal();
    }
    return *S_;
  }

  /// <f, 1>_mu = sum_i w_i f_i.
  double weighted_sum(const Eigen::VectorXd& f) const { return w_.dot(f); }

 private:
  Eigen::MatrixXd K_;
  Eigen::VectorXd w_;
  double total_mass_;
  mutable std::optional<Eigen::MatrixXd> S_;
};

inline DiscreteOperator discretize(const Kernel& k, const TypeSpace& ts) {
  const auto m = static_cast<Eigen::Index>(ts.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = k(ts.points[i], ts.points[j]);
      if (!std::isfinite(v))
        throw std::domain_error("discretize: non-finite kernel value at mesh point");
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ts.weights.data(), m);
  return DiscreteOperator(std::move(K), std::move(w));
}

inline Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& f) {
  if (f.size() != op.size()) throw std::invalid_argument("apply: length mismatch");
  return op.kernel_matrix() * op.weights().cwiseProduct(f);
}

struct NormResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Spectral radius of the symmetrized operator by power iteration with
/// a random positive start; equals ||T_kappa|| in L^2(mu) for the
/// discretized operator. Non-convergence within the cap reports the
/// last Rayleigh-quotient estimate.
inline NormResult operator_norm(const DiscreteOperator& op, double tol = 1e-12,
                                std::size_t max_iter = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be > 0");
  const Eigen::MatrixXd& S = op.symmetric_form();
  const Eigen::Index m = op.size();
  Rng rng(0x5057a17eULL, 7);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = 0.5 + rng.next_unit();
  v.normalize();

  NormResult res;
  double rq_prev = 0.0;
  int stable = 0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd sv = S * v;
    const double norm_sv = sv.norm();
    if (norm_sv == 0.0) {
      res.value = 0.0;
      res.iterations = it;
      res.converged = true;
      return res;
    }
    const double rq = v.dot(sv);
    v = sv / norm_sv;
    if (it > 1 && std::abs(rq - rq_prev) <= tol * std::max(std::abs(rq), 1e-300)) {
      if (++stable >= 2) {
        res.value = rq;
        res.iterations = it;
        res.converged = true;
        return res;
      }
    } else {
      stable = 0;
    }
    rq_prev = rq;
    res.value = rq;
    res.iterations = it;
  }
  res.converged = false;
  return res;
}

enum class SeriesReason { converged, ratio_ge_one, j_max_hit };

inline const char* to_string(SeriesReason r) {
  switch (r) {
    case SeriesReason::converged: return "converged";
    case SeriesReason::ratio_ge_one: return "ratio_ge_one";
    default: return "j_max_hit";
  }
}

/// Outcome of summing mu(S)^{-1} sum_j <T^j 1, 1>. `terms` holds the
/// raw generation contributions <T^j 1, 1>; partial sums are
/// nondecreasing since everything is non-negative.
struct SeriesResult {
  double value = 0.0;  // +inf when diverged
  bool diverged = false;
  std::vector<double> terms;
  std::size_t j_stop = 0;
  SeriesReason reason = SeriesReason::j_max_hit;
  double last_ratio = 0.0;

  bool converged() const { return reason == SeriesReason::converged; }
};

/// Susceptibility via the generation series chi = mu(S)^{-1} sum_j
/// <T^j 1, 1>. Stops once the term ratio has stabilized below one and
/// the geometric tail estimate drops under tol (the estimate is then
/// added to the sum); declares divergence after 10 consecutive ratios
/// >= 1. Near-critical ratios creep up slowly, hence the
/// consecutive-count rule rather than a one-shot test.
inline SeriesResult susceptibility_series(const DiscreteOperator& op, double tol = 1e-10,
                                          std::size_t j_max = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("susceptibility_series: tol must be > 0");
  const double mass = op.total_mass();
  SeriesResult res;
  Eigen::VectorXd g = Eigen::VectorXd::Ones(op.size());
  double t = op.weighted_sum(g);  // <T^0 1, 1> = mu(S)
  res.terms.push_back(t);
  double partial = t;
  int ratios_ge_one = 0;
  int ratios_below_one = 0;
  for (std::size_t j = 1; j <= j_max; ++j) {
    g = apply(op, g);
    const double t_next = op.weighted_sum(g);
    res.terms.push_back(t_next);
    partial += t_next;
    res.j_stop = j;
    if (t <= 0.0) {  // kernel annihilated the constant: series terminates
      res.value = partial / mass;
      res.reason = SeriesReason::converged;
      return res;
    }
    const double r = t_next / t;
    res.last_ratio = r;
    t = t_next;
    if (t_next == 0.0) {
      res.value = partial / mass;
      res.reason = SeriesReason::converged;
      return res;
    }
    if (r >= 1.0) {
      ratios_below_one = 0;
      if (++ratios_ge_one >= 10) {
        res.value = std::numeric_limits<double>::infinity();
        res.diverged = true;
        res.reason = SeriesReason::ratio_ge_one;
        return res;
      }
    } else {
      ratios_ge_one = 0;
      ++ratios_below_one;
      const double tail = t_next * r / (1.0 - r);
      if (ratios_below_one >= 3 && tail / mass < tol) {
        res.value = (partial + tail) / mass;
        res.reason = SeriesReason::converged;
        return res;
      }
    }
  }
  res.value = partial / mass;
  res.reason = SeriesReason::j_max_hit;
  return res;
}

struct PointwiseResult {
  Eigen::VectorXd values;
  std::size_t iterations = 0;
  SeriesReason reason = SeriesReason::j_max_hit;
};

/// Pointwise susceptibility f(x_i) = sum_j (T^j 1)(x_i) via the
/// monotone iteration f <- T f + 1 from f = 0, which climbs to the
/// minimal non-negative solution of f = T f + 1. The geometric tail of
/// the final generation is added once the term ratio settles below 1.
inline PointwiseResult susceptibility_pointwise(const DiscreteOperator& op, double tol = 1e-10,
                                                std::size_t j_max = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("susceptibility_pointwise: tol must be > 0");
  const double mass = op.total_mass();
  Eigen::VectorXd g = Eigen::VectorXd::Ones(op.size());
  Eigen::VectorXd f = g;
  double t = op.weighted_sum(g);
  int ratios_ge_one = 0;
  int ratios_below_one = 0;
  PointwiseResult res;
  for (std::size_t j = 1; j <= j_max; ++j) {
    g = apply(op, g);
    f += g;
    res.iterations = j;
    const double t_next = op.weighted_sum(g);
    if (t_next == 0.0 || t <= 0.0) {
      res.values = f;
      res.reason = SeriesReason::converged;
      return res;
    }
    const double r = t_next / t;
    t = t_next;
    if (r >= 1.0) {
      ratios_below_one = 0;
      if (++ratios_ge_one >= 10) {
        res.values = f;
        res.reason = SeriesReason::ratio_ge_one;
        return res;
      }
    } else {
      ratios_ge_one = 0;
      ++ratios_below_one;
      if (ratios_below_one >= 3 && (t_next * r / (1.0 - r)) / mass < tol) {
        f += g * (r / (1.0 - r));
        res.values = f;
        res.reason = SeriesReason::converged;
        return res;
      }
    }
  }
  res.values = f;
  res.reason = SeriesReason::j_max_hit;
  return res;
}

/// Direct dense solve of (I - K diag(w)) f = 1; only valid as the
/// minimal-solution oracle below criticality, so supercritical and
/// critical operators are rejected.
inline Eigen::VectorXd solve_linear(const DiscreteOperator& op) {
  const NormResult nr = operator_norm(op, 1e-12);
  if (!(nr.value < 1.0))
    throw std::domain_error("solve_linear: operator norm >= 1 (not subcritical)");
  const Eigen::Index m = op.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) -
                      op.kernel_matrix() * op.weights().asDiagonal();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd f = lu.solve(rhs);
  const double resid = (A * f - rhs).cwiseAbs().maxCoeff();
  if (!std::isfinite(resid) || resid > 1e-6)
    throw std::runtime_error("solve_linear: singular or ill-conditioned system, residual " +
                             std::to_string(resid));
  return f;
}

struct SupersolutionReport {
  double min_residual = 0.0;  // min_i f_i - ((T f)_i + 1)
  Eigen::Index argmin = 0;
  bool certifies = false;     // non-negative residual certifies chi < infinity
};

/// Checks the supersolution inequality f >= T f + 1 componentwise.
inline SupersolutionReport verify_supersolution(const DiscreteOperator& op,
                                                const Eigen::VectorXd& f) {
  if ((f.array() < 0.0).any())
    throw std::invalid_argument("verify_supersolution: f must be non-negative");
  Eigen::VectorXd resid = f - (apply(op, f) + Eigen::VectorXd::Ones(op.size()));
  SupersolutionReport rep;
  rep.min_residual = resid.minCoeff(&rep.argmin);
  rep.certifies = rep.min_residual >= 0.0;
  return rep;
}

/// lambda_c = 1 / ||T_kappa|| for the family lambda*kappa.
inline double critical_lambda_norm(const Kernel& k, const TypeSpace& ts) {
  const DiscreteOperator op = discretize(k, ts);
  const NormResult nr = operator_norm(op, 1e-12);
  if (!(nr.value > 0.0))
    throw std::domain_error("critical_lambda_norm: operator norm is zero");
  return 1.0 / nr.value;
}

namespace detail {

/// Subcritical/supercritical verdict for lambda * base operator,
/// decided by the susceptibility series status; an undecided series is
/// classified by its final term ratio.
inline bool lambda_is_subcritical(const Eigen::MatrixXd& K, const Eigen::VectorXd& w,
                                  double lambda) {
  DiscreteOperator op(lambda * K, w);
  const SeriesResult s = susceptibility_series(op, 1e-9, 5000);
  if (s.reason == SeriesReason::converged) return true;
  if (s.reason == SeriesReason::ratio_ge_one) return false;
  return s.last_ratio < 1.0;
}

}  // namespace detail

/// lambda_c located by bisection on solvability of f = 1 + lambda T f,
/// i.e. on the convergence status of the susceptibility series.
inline double critical_lambda_solvability(const Kernel& k, const TypeSpace& ts, double lo,
                                          double hi, double tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("critical_lambda_solvability: need 0 < lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("critical_lambda_solvability: tol must be > 0");
  const DiscreteOperator base = discretize(k, ts);
  const Eigen::MatrixXd& K = base.kernel_matrix();
  const Eigen::VectorXd& w = base.weights();
  if (!detail::lambda_is_subcritical(K, w, lo))
    throw std::invalid_argument("critical_lambda_solvability: lo is not subcritical");
  if (detail::lambda_is_subcritical(K, w, hi))
    throw std::invalid_argument("critical_lambda_solvability: hi is not supercritical");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (detail::lambda_is_subcritical(K, w, mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace suskit
