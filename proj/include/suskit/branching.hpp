#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "suskit/nystrom.hpp"
#include "suskit/rng.hpp"

namespace suskit {

struct SurvivalResult {
  Eigen::VectorXd rho;
  std::size_t iterations = 0;
  bool converged = false;
  double last_step = 0.0;
};

/// Maximal solution of f = 1 - exp(-T f) by fixed-point iteration from
/// f = 1; iterates decrease componentwise, so the limit is the maximal
/// solution rho. Exhausting max_iter (expected only at criticality)
/// reports the last sup-norm step.
inline SurvivalResult survival_probability(const DiscreteOperator& op, double tol = 1e-12,
                                           std::size_t max_iter = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("survival_probability: tol must be > 0");
  SurvivalResult res;
  Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd next = 1.0 - (-apply(op, f)).array().exp();
    res.last_step = (next - f).cwiseAbs().maxCoeff();
    f = next;
    res.iterations = it;
    if (res.last_step < tol) {
      res.converged = true;
      break;
    }
  }
  res.rho = std::move(f);
  return res;
}

/// Dual operator: same kernel matrix on the tilted measure
/// d mu~ = (1 - rho) d mu; its total mass is mu(S) - rho(kappa).
inline DiscreteOperator dual_operator(const DiscreteOperator& op, const Eigen::VectorXd& rho) {
  if (rho.size() != op.size()) throw std::invalid_argument("dual_operator: length mismatch");
  if ((rho.array() < 0.0).any() || (rho.array() > 1.0).any())
    throw std::invalid_argument("dual_operator: rho must lie in [0,1]");
  Eigen::VectorXd w = op.weights().cwiseProduct(Eigen::VectorXd::Ones(op.size()) - rho);
  return DiscreteOperator(op.kernel_matrix(), std::move(w));
}

struct BranchingFlags {
  bool subcritical = false;
  bool at_criticality = false;   // ||T|| within 1e-6 of 1: mesh-limited values
  bool dual_critical = false;    // ||T_dual|| within 1e-6 of 1: chi_hat unreliable
  bool rho_converged = true;
};

/// Survival probabilities, susceptibility and modified susceptibility
/// for one discretized kernel.
struct BranchingResult {
  Eigen::VectorXd rho;        // survival probability per type
  double rho_total = 0.0;     // integral of rho d mu
  SeriesResult chi;           // susceptibility (diverges when supercritical)
  double chi_hat = 0.0;
  bool chi_hat_available = false;
  double norm = 0.0;
  double dual_norm = 0.0;
  double lsusq_deviation = 0.0;  // relative gap in the duality identity
  std::size_t iterations = 0;
  BranchingFlags flags;
};

/// chi_hat via the dual operator: chi_hat = mu(S)^{-1} <(I-T~)^{-1} 1, 1>_mu~.
/// Cross-checked against the renormalized-dual identity
/// chi_hat = mu~(S)/mu(S) * chi(kappa~') where kappa~' = mu~(S) kappa~ on
/// the dual measure normalized to match the original total mass scale.
inline BranchingResult modified_susceptibility(const DiscreteOperator& op, double tol = 1e-12) {
  BranchingResult res;
  const double mass = op.total_mass();
  const NormResult nr = operator_norm(op, 1e-12);
  res.norm = nr.value;
  res.flags.at_criticality = std::abs(nr.value - 1.0) <= 1e-6;
  res.flags.subcritical = nr.value < 1.0;

  const SurvivalResult sr = survival_probability(op, tol);
  res.rho = sr.rho;
  res.iterations = sr.iterations;
  res.flags.rho_converged = sr.converged;
  res.rho_total = op.weighted_sum(sr.rho);

  res.chi = susceptibility_series(op, std::max(tol, 1e-12));

  if (res.flags.subcritical) {
    // rho = 0 below criticality; the fixed point can only stall at
    // tiny positive values, so snap it.
    if (res.rho.maxCoeff() < 1e-6) {
      res.rho.setZero();
      res.rho_total = 0.0;
    }
    res.chi_hat = res.chi.value;
    res.chi_hat_available = res.chi.converged();
    res.dual_norm = res.norm;
    return res;
  }

  const DiscreteOperator dual = dual_operator(op, res.rho);
  const NormResult dn = operator_norm(dual, 1e-12);
  res.dual_norm = dn.value;
  if (dn.value >= 1.0 - 1e-6) {
    // Equality ||T~|| = 1 is possible; near it the dual solve is
    // meaningless at mesh precision.
    res.flags.dual_critical = true;
    res.chi_hat = std::numeric_limits<double>::infinity();
    res.chi_hat_available = false;
    return res;
  }

  const Eigen::VectorXd f = solve_linear(dual);
  res.chi_hat = dual.weighted_sum(f) / mass;
  res.chi_hat_available = true;

  // Duality identity: chi_hat = (mu~(S)/mu(S)) * chi(renormalized dual).
  const double dual_mass = dual.total_mass();
  if (dual_mass > 0.0) {
    DiscreteOperator renorm(dual.kernel_matrix() * dual_mass, dual.weights() / dual_mass);
    const SeriesResult s = susceptibility_series(renorm, 1e-12);
    if (s.converged()) {
      const double via_identity = dual_mass / mass * s.value;
      res.lsusq_deviation = std::abs(via_identity - res.chi_hat) / std::abs(res.chi_hat);
    }
  }
  return res;
}

/// Table of rho_k(kappa; x) and their integrals for k = 1..k_max.
struct RhoKTable {
  std::size_t k_max = 0;
  std::vector<Eigen::VectorXd> pointwise;  // pointwise[k-1] = rho_k(x_i)
  std::vector<double> totals;              // totals[k-1] = integral rho_k d mu
};

namespace detail {

/// Enumerates integer partitions of n as multiplicity lists
/// {(part, count)}, invoking fn on each.
template <typename Fn>
void for_each_partition(std::size_t n, Fn&& fn) {
  std::vector<std::pair<std::size_t, std::size_t>> current;
  auto rec = [&](auto&& self, std::size_t rem, std::size_t max_part) -> void {
    if (rem == 0) {
      fn(current);
      return;
    }
    for (std::size_t p = std::min(rem, max_part); p >= 1; --p) {
      std::size_t mult = 0;
      std::size_t used = 0;
      current.emplace_back(p, 0);
      while (used + p <= rem) {
        used += p;
        ++mult;
        current.back().second = mult;
        self(self, rem - used, p - 1);
      }
      current.pop_back();
    }
  };
  rec(rec, n, n);
}

}  // namespace detail

/// Probabilities rho_k(x) = P(|X_kappa(x)| = k) by the partition
/// recursion: rho_1 = exp(-T 1) and, for k >= 2, one term
/// rho_1 prod_j (T rho_j)^{m_j} / m_j! per partition 1^{m_1} 2^{m_2}...
/// of k-1. The T rho_j vectors are memoized across k.
inline RhoKTable rho_k_pointwise(const DiscreteOperator& op, std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("rho_k_pointwise: k_max must be >= 1");
  if (k_max > 40) throw std::invalid_argument("rho_k_pointwise: k_max > 40 (partition count guard)");
  RhoKTable table;
  table.k_max = k_max;
  const Eigen::Index m = op.size();

  std::vector<double> factorial(k_max + 1, 1.0);
  for (std::size_t i = 1; i <= k_max; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  Eigen::VectorXd rho1 = (-apply(op, Eigen::VectorXd::Ones(m))).array().exp();
  table.pointwise.push_back(rho1);
  std::vector<Eigen::VectorXd> t_rho;  // t_rho[j-1] = T rho_j
  t_rho.push_back(apply(op, rho1));

  for (std::size_t k = 2; k <= k_max; ++k) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    detail::for_each_partition(k - 1, [&](const auto& parts) {
      Eigen::VectorXd term = Eigen::VectorXd::Ones(m);
      for (const auto& [part, mult] : parts) {
        const Eigen::VectorXd& tr = t_rho[part - 1];
        for (std::size_t r = 0; r < mult; ++r) term = term.cwiseProduct(tr);
        term /= factorial[mult];
      }
      acc += term;
    });
    Eigen::VectorXd rk = rho1.cwiseProduct(acc);
    t_rho.push_back(apply(op, rk));
    table.pointwise.push_back(std::move(rk));
  }
  table.totals.reserve(k_max);
  for (const auto& v : table.pointwise) table.totals.push_back(op.weighted_sum(v));
  return table;
}

struct ProgenyResult {
  std::uint64_t total = 0;
  bool cap_hit = false;
};

/// Breadth-first simulation of the multi-type Galton-Watson process:
/// an individual of type x_i begets, for each type x_j, an independent
/// Poisson(K(i,j) w_j) count of children. Counting stops at `cap`.
inline ProgenyResult simulate_branching(const DiscreteOperator& op, Eigen::Index root,
                                        std::uint64_t cap, Rng& rng) {
  if (cap < 1) throw std::invalid_argument("simulate_branching: cap must be >= 1");
  if (root < 0 || root >= op.size()) throw std::invalid_argument("simulate_branching: bad root");
  const Eigen::MatrixXd& K = op.kernel_matrix();
  const Eigen::VectorXd& w = op.weights();
  const Eigen::Index m = op.size();

  ProgenyResult res;
  res.total = 1;
  std::deque<Eigen::Index> frontier{root};
  while (!frontier.empty()) {
    const Eigen::Index i = frontier.front();
    frontier.pop_front();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double mean = K(i, j) * w[j];
      if (mean <= 0.0) continue;
      const std::uint64_t c = rng.poisson(mean);
      for (std::uint64_t r = 0; r < c; ++r) {
        if (res.total >= cap) {
          res.cap_hit = true;
          return res;
        }
        ++res.total;
        frontier.push_back(j);
      }
    }
  }
  return res;
}

/// Draws the root type from mu / mu(S).
inline Eigen::Index sample_root(const DiscreteOperator& op, Rng& rng) {
  const double target = rng.next_unit() * op.total_mass();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    acc += op.weights()[i];
    if (target <= acc) return i;
  }
  return op.size() - 1;
}

struct McEstimates {
  double mean_capped = 0.0;     // mean of min(|X|, cap): chi proxy
  double se_capped = 0.0;
  double mean_on_finite = 0.0;  // mean over runs that stayed below cap
  double se_on_finite = 0.0;
  double frac_cap_hit = 0.0;    // estimates rho when cap is large
  double se_frac = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t cap = 0;
};

/// Monte-Carlo susceptibility: chi = E|X| and the conditional mean
/// E(|X| given finite), with the cap-hit fraction reported rather than
/// hidden (it estimates the survival probability).
inline McEstimates mc_susceptibility(const DiscreteOperator& op, std::uint64_t n_runs,
                                     std::uint64_t cap, std::uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("mc_susceptibility: n_runs must be >= 1");
  McEstimates est;
  est.runs = n_runs;
  est.cap = cap;
  double sum = 0.0, sumsq = 0.0;
  double sum_fin = 0.0, sumsq_fin = 0.0;
  std::uint64_t n_fin = 0;
  for (std::uint64_t r = 0; r < n_runs; ++r) {
    Rng rng = replicate_rng(seed, r);
    const Eigen::Index root = sample_root(op, rng);
    const ProgenyResult pr = simulate_branching(op, root, cap, rng);
    const double x = static_cast<double>(pr.total);
    sum += x;
    sumsq += x * x;
    if (!pr.cap_hit) {
      sum_fin += x;
      sumsq_fin += x * x;
      ++n_fin;
    }
  }
  const double n = static_cast<double>(n_runs);
  est.mean_capped = sum / n;
  if (n_runs > 1)
    est.se_capped = std::sqrt(std::max(0.0, (sumsq / n - est.mean_capped * est.mean_capped) / (n - 1.0)));
  est.frac_cap_hit = static_cast<double>(n_runs - n_fin) / n;
  est.se_frac = std::sqrt(est.frac_cap_hit * (1.0 - est.frac_cap_hit) / n);
  if (n_fin > 0) {
    const double nf = static_cast<double>(n_fin);
    est.mean_on_finite = sum_fin / nf;
    if (n_fin > 1)
      est.se_on_finite =
          std::sqrt(std::max(0.0, (sumsq_fin / nf - est.mean_on_finite * est.mean_on_finite) / (nf - 1.0)));
  }
  return est;
}

}  // namespace suskit
