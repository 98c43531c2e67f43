#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "suskit/closedform.hpp"
#include "suskit/typespace.hpp"

using namespace suskit;
namespace cf = suskit::closedform;

namespace {

double er_rho_bisect(double lambda) {
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - (1.0 - std::exp(-lambda * mid)) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("er closed forms") {
  REQUIRE(*cf::er_chi(0.5) == 2.0);
  REQUIRE_FALSE(cf::er_chi(1.0).has_value());
  REQUIRE_FALSE(cf::er_chi(1.5).has_value());

  REQUIRE(cf::er_rho(0.7) == 0.0);
  REQUIRE(cf::er_rho(2.0) == Catch::Approx(er_rho_bisect(2.0)).margin(1e-12));

  const double rho = er_rho_bisect(2.0);
  REQUIRE(*cf::er_chi_hat(2.0) == Catch::Approx((1.0 - rho) / (1.0 - 2.0 * (1.0 - rho))).margin(1e-12));
  REQUIRE(*cf::er_chi_hat(0.5) == 2.0);
  REQUIRE_FALSE(cf::er_chi_hat(1.0).has_value());
}

TEST_CASE("er chi_hat Taylor expansion near 1") {
  // chi_hat(1+eps) = 1/eps - 4/3 + (4/3) eps - (176/135) eps^2 + ...
  for (const double eps : {0.01, 0.02}) {
    const double got = *cf::er_chi_hat(1.0 + eps) - 1.0 / eps;
    const double expect = -4.0 / 3.0 + 4.0 / 3.0 * eps - 176.0 / 135.0 * eps * eps;
    REQUIRE(got == Catch::Approx(expect).margin(5e-5));
  }
}

TEST_CASE("Borel probabilities") {
  REQUIRE(cf::er_borel_rhok(0.7, 1) == Catch::Approx(std::exp(-0.7)).epsilon(1e-14));
  REQUIRE(cf::er_borel_rhok(1.0, 2) == Catch::Approx(std::exp(-2.0)).epsilon(1e-13));
  // Tree-function identity: sum k rho_k = chi = 1/(1-lambda) below criticality.
  double s = 0.0;
  for (std::uint64_t k = 1; k <= 200; ++k) s += static_cast<double>(k) * cf::er_borel_rhok(0.5, k);
  REQUIRE(s == Catch::Approx(2.0).margin(1e-8));
  // large-k safety: log-space evaluation does not overflow
  REQUIRE(std::isfinite(cf::er_borel_rhok(0.5, 500)));
}

TEST_CASE("rank1 subcritical chi") {
  REQUIRE(*cf::rank1_chi_sub(1.0, 1.0, 0.3) == Catch::Approx(1.0 / 0.7).epsilon(1e-14));
  REQUIRE(*cf::rank1_chi_sub(1.5, 7.0 / 3.0, 0.1) == Catch::Approx(1.29348).margin(5e-6));
  REQUIRE_FALSE(cf::rank1_chi_sub(1.5, 7.0 / 3.0, 3.0 / 7.0).has_value());
}

TEST_CASE("rank1 xi parameterization") {
  const auto psi_one = [](double) { return 1.0; };
  const TypeSpace atom = build_finite_space({1.0});
  // lambda(xi) = xi / (1 - e^{-xi}); at xi=2 this is 2.3130352855...
  REQUIRE(cf::rank1_xi_to_lambda(psi_one, atom, 2.0) ==
          Catch::Approx(2.0 / (1.0 - std::exp(-2.0))).epsilon(1e-14));
  // xi -> 0 approaches lambda_c = 1/int psi^2 = 1
  REQUIRE(cf::rank1_xi_to_lambda(psi_one, atom, 1e-6) == Catch::Approx(1.0).margin(1e-5));

  // roundtrip on a non-trivial space
  const auto psi = [](double x) { return 1.0 + x; };
  const TypeSpace u = build_uniform_mesh(400);
  for (const double lambda : {0.5, 0.7, 1.0}) {
    const double xi = cf::rank1_lambda_to_xi(psi, u, lambda, 1e-13);
    REQUIRE(cf::rank1_xi_to_lambda(psi, u, xi) == Catch::Approx(lambda).epsilon(1e-10));
  }
  REQUIRE_THROWS_AS(cf::rank1_lambda_to_xi(psi, u, 0.1, 1e-10), std::invalid_argument);
}

TEST_CASE("rank1 chi_hat reduces to ER for psi = 1") {
  const TypeSpace atom = build_finite_space({1.0});
  const cf::Rank1ChiHat r = cf::rank1_chi_hat([](double) { return 1.0; }, atom, 2.0, 1e-14);
  REQUIRE_FALSE(r.near_critical);
  REQUIRE(r.value == Catch::Approx(*cf::er_chi_hat(2.0)).margin(1e-9));
  REQUIRE(r.value == Catch::Approx(0.342284).margin(1e-6));
}

TEST_CASE("chkns chi and chi_hat") {
  REQUIRE(*cf::chkns_chi(0.25) == 2.0);
  REQUIRE(*cf::chkns_chi(0.1) == Catch::Approx((1.0 - std::sqrt(0.6)) / 0.2).epsilon(1e-14));
  REQUIRE(*cf::chkns_chi(0.1) == Catch::Approx(1.127017).margin(1e-6));
  REQUIRE_FALSE(cf::chkns_chi(0.3).has_value());

  // jump from 2 to 4 across the critical point
  REQUIRE(cf::chkns_chi_hat(0.25) == 2.0);
  REQUIRE(cf::chkns_chi_hat(0.25 + 1e-9) == Catch::Approx(4.0).margin(1e-7));
  REQUIRE(cf::chkns_chi_hat(0.5) == 2.0);
  REQUIRE(cf::chkns_chi_hat(0.2) == Catch::Approx(*cf::chkns_chi(0.2)).epsilon(1e-15));
}

TEST_CASE("chkns recursion matches the closed forms for rho_1..rho_4") {
  for (const double l : {0.1, 0.25, 1.0}) {
    const std::vector<double> rho = cf::chkns_rhok_recursion(l, 4);
    const double r1 = 1.0 / (1.0 + l);
    const double r2 = l / (std::pow(1.0 + l, 2) * (1.0 + 2.0 * l));
    const double r3 = 3.0 * l * l / (std::pow(1.0 + l, 3) * (1.0 + 2.0 * l) * (1.0 + 3.0 * l));
    const double r4 = 2.0 * std::pow(l, 3) * (7.0 + 15.0 * l) /
                      (std::pow(1.0 + l, 4) * std::pow(1.0 + 2.0 * l, 2) * (1.0 + 3.0 * l) *
                       (1.0 + 4.0 * l));
    REQUIRE(rho[0] == Catch::Approx(r1).epsilon(1e-12));
    REQUIRE(rho[1] == Catch::Approx(r2).epsilon(1e-12));
    REQUIRE(rho[2] == Catch::Approx(r3).epsilon(1e-12));
    REQUIRE(rho[3] == Catch::Approx(r4).epsilon(1e-12));
  }
}

TEST_CASE("chkns recursion convolution is direction-stable") {
  const std::vector<double> rho = cf::chkns_rhok_recursion(0.5, 400);
  // recompute each term with the inner sum reversed
  for (std::size_t k = 50; k <= 400; k += 50) {
    double rev = 0.0;
    for (std::size_t j = k - 1; j >= 1; --j) rev += rho[k - j - 1] * rho[j - 1];
    const double kd = static_cast<double>(k);
    const double again = kd * 0.5 / (2.0 * (1.0 + kd * 0.5)) * rev;
    REQUIRE(std::abs(again - rho[k - 1]) <= 1e-15 * rho[k - 1]);
  }
}

TEST_CASE("chkns rho via the generating-function ODE") {
  REQUIRE(cf::chkns_rho_via_ode(0.2).rho == 0.0);

  const double lambda = 0.5;
  const cf::OdeRho ode = cf::chkns_rho_via_ode(lambda);
  REQUIRE(ode.stable);
  const std::vector<double> rho = cf::chkns_rhok_recursion(lambda, 20000);
  double tail_sum = 0.0, k_sum = 0.0, k2_sum = 0.0;
  for (std::size_t k = 1; k <= rho.size(); ++k) {
    tail_sum += rho[k - 1];
    k_sum += static_cast<double>(k) * rho[k - 1];
    k2_sum += static_cast<double>(k) * static_cast<double>(k) * rho[k - 1];
  }
  REQUIRE(ode.rho == Catch::Approx(1.0 - tail_sum).margin(1e-3));
  REQUIRE(k_sum == Catch::Approx(2.0).epsilon(0.02));                 // chi_hat = 1/lambda
  REQUIRE(k2_sum == Catch::Approx(1.0 / (lambda * ode.rho)).epsilon(0.01));  // second moment
}

TEST_CASE("chkns pointwise solution") {
  const cf::PointwiseSolution crit = cf::chkns_chi_solution_pointwise(0.25);
  REQUIRE(crit.alpha_plus == 0.5);
  REQUIRE(crit.f(0.25) == Catch::Approx(2.0).epsilon(1e-14));  // x^{-1/2}
  REQUIRE(crit.integral == 2.0);

  const cf::PointwiseSolution gentle = cf::chkns_chi_solution_pointwise(1e-9);
  REQUIRE(gentle.f(0.37) == Catch::Approx(1.0).margin(1e-6));

  REQUIRE_THROWS_AS(cf::chkns_chi_solution_pointwise(0.3), std::invalid_argument);
}

TEST_CASE("dubins closed forms") {
  REQUIRE(*cf::dubins_chi(0.25) == Catch::Approx(4.0).epsilon(1e-12));
  REQUIRE(*cf::dubins_chi(0.1) ==
          Catch::Approx((1.0 - 0.2 - std::sqrt(0.6)) / 0.02).epsilon(1e-13));
  REQUIRE(*cf::dubins_chi(0.1) == Catch::Approx(1.270167).margin(1e-6));
  REQUIRE_FALSE(cf::dubins_chi(0.3).has_value());

  REQUIRE(cf::dubins_rhok(1.0, 1) == Catch::Approx(std::exp(-1.0) / 2.0).epsilon(1e-14));
  REQUIRE(cf::dubins_rhok(1.0, 1) == Catch::Approx(0.183940).margin(1e-6));
  REQUIRE(cf::dubins_rhok(1.0, 2) == Catch::Approx(2.0 * std::exp(-2.0) / 6.0).epsilon(1e-14));
  REQUIRE(cf::dubins_rhok(1.0, 3) ==
          Catch::Approx(33.0 * std::exp(-3.0) / (2.0 * 4.0 * 3.0 * 4.0)).epsilon(1e-13));
  REQUIRE_THROWS_AS(cf::dubins_rhok(1.0, 4), std::invalid_argument);
}

TEST_CASE("dubins analytic operator identity: f = Tf + 1 via the x^gamma formula") {
  // T_{lambda kappa}(x^gamma) = lambda/gamma - lambda/(gamma(gamma+1)) x^gamma,
  // applied to f = alpha_+^{-1} x^{alpha_+ - 1}.
  const double lambda = 0.2;
  const double alpha = 0.5 + std::sqrt(0.25 - lambda);
  const double gamma = alpha - 1.0;
  for (double x = 0.05; x < 1.0; x += 0.05) {
    const double f = std::pow(x, gamma) / alpha;
    const double Tf =
        (lambda / gamma - lambda / (gamma * (gamma + 1.0)) * std::pow(x, gamma)) / alpha;
    REQUIRE(std::abs(f - (Tf + 1.0)) < 1e-10);
  }
}

TEST_CASE("sturm-liouville route for phi = 1 - x") {
  const auto phi = [](double x) { return 1.0 - x; };
  const auto dphi = [](double) { return -1.0; };

  const cf::SturmLiouvilleChi r1 = cf::maxkernel_chi_ode(phi, dphi, 1.0);
  REQUIRE(r1.subcritical);
  REQUIRE(*r1.chi == Catch::Approx(std::tan(1.0)).margin(1e-6));

  for (const double lambda : {0.5, 2.0}) {
    const cf::SturmLiouvilleChi r = cf::maxkernel_chi_ode(phi, dphi, lambda);
    REQUIRE(r.subcritical);
    REQUIRE(*r.chi == Catch::Approx(std::tan(std::sqrt(lambda)) / std::sqrt(lambda)).margin(1e-6));
  }

  const cf::SturmLiouvilleChi sup = cf::maxkernel_chi_ode(phi, dphi, 3.0);
  REQUIRE_FALSE(sup.subcritical);
  REQUIRE_FALSE(sup.chi.has_value());

  REQUIRE(cf::maxkernel_lambda_c(phi, dphi, 2.0, 3.0, 1e-7) ==
          Catch::Approx(M_PI * M_PI / 4.0).margin(1e-3));
}

TEST_CASE("sturm-liouville route reduces to ER for phi = 1") {
  const auto phi = [](double) { return 1.0; };
  const auto dphi = [](double) { return 0.0; };
  const cf::SturmLiouvilleChi r = cf::maxkernel_chi_ode(phi, dphi, 0.5);
  REQUIRE(r.subcritical);
  REQUIRE(*r.chi == Catch::Approx(2.0).margin(1e-9));
}
