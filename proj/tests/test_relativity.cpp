#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>

#include "bms/quadrature.hpp"
#include "bms/relativity.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using bms::ErrorCode;
using bms::MixingDistribution;

TEST_SUITE("relativity") {

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    const auto rule = bms::gauss_legendre(n);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t k = 0; k < 2 * n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(k));
      const double want = k % 2 ? 0.0 : 2.0 / (k + 1.0);
      CHECK(std::abs(sum - want) < 1e-13);
    }
  }
}

TEST_CASE("graded rule covers (0, 1) and rounds its order up") {
  const auto rule = bms::graded_unit_rule(250);
  CHECK(rule.nodes.size() % bms::graded_panel_count() == 0);
  CHECK(rule.nodes.size() >= 250);
  CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(rule.complements.size() == rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    CHECK(rule.nodes[k] > 0.0);
    CHECK(rule.nodes[k] <= 1.0);
    CHECK(rule.complements[k] > 0.0);
    CHECK(std::abs(rule.nodes[k] + rule.complements[k] - 1.0) < 1e-15);
  }
  CHECK(code_of([] { bms::graded_unit_rule(8); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("mixing laws have unit mean and monotone quantiles") {
  const MixingDistribution laws[] = {MixingDistribution::exponential_unit(), MixingDistribution::gamma_unit_mean(0.5),
                                     MixingDistribution::gamma_unit_mean(3.0), MixingDistribution::dirac()};
  for (const auto& law : laws) {
    CHECK(std::abs(bms::mix_integral([](double t) { return t; }, law) - 1.0) < 1e-10);
    CHECK(std::abs(bms::mix_integral([](double) { return 1.0; }, law) - 1.0) < 1e-13);
    double prev = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double q = law.quantile(k / 1000.0);
      CHECK(q >= prev);
      prev = q;
      CHECK(law.upper_quantile(1.0 - k / 1000.0) == doctest::Approx(q).epsilon(1e-10));
    }
    CHECK(std::isfinite(law.upper_quantile(1e-25)));
  }
  CHECK(MixingDistribution::exponential_unit().quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const boost::math::gamma_distribution<double> g(3.0, 1.0 / 3.0);
  CHECK(MixingDistribution::gamma_unit_mean(3.0).quantile(0.3) ==
        doctest::Approx(boost::math::quantile(g, 0.3)).epsilon(1e-14));
  CHECK(code_of([] { MixingDistribution::gamma_unit_mean(0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { MixingDistribution::exponential_unit().quantile(1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("exponential-mixing moments against k!/(1+a)^(k+1)") {
  const auto law = MixingDistribution::exponential_unit();
  CHECK(std::abs(bms::mix_integral([](double t) { return t * t * std::exp(-0.3 * t); }, law) -
                 2.0 / std::pow(1.3, 3)) < 1e-12);
  for (int k = 0; k <= 6; ++k) {
    for (double a : {0.0, 0.05, 0.1, 0.3, 0.7, 1.5, 3.0}) {
      CAPTURE(k);
      CAPTURE(a);
      const double got = bms::mix_integral([&](double t) { return std::pow(t, k) * std::exp(-a * t); }, law);
      CHECK(std::abs(got - oracle::exp_mixing_moment(k, a)) < 1e-9);
    }
  }
}

TEST_CASE("non-finite integrands are reported") {
  CHECK(code_of([] {
          bms::mix_integral([](double t) { return 1.0 / (t - t); }, MixingDistribution::exponential_unit());
        }) == ErrorCode::NonFiniteIntegrand);
}

TEST_CASE("profiles for the coarse and fine tariffs") {
  const auto& c = fixture::coarse();
  const double pi[] = {0.8185, 0.0716, 0.0591, 0.0508};
  const double r[] = {0.8050, 1.6543, 1.8899, 2.1844};
  for (std::size_t l = 0; l < 4; ++l) {
    CHECK(std::abs(c.profile.proportions[l] - pi[l]) < 5e-4);
    CHECK(std::abs(c.profile.relativities[l] - r[l]) < 5e-4);
  }
  CHECK(c.profile.malus_entry == std::optional<std::size_t>(1));

  const auto& f = fixture::fine();
  const double pi4[] = {0.7951, 0.0679, 0.0717, 0.0653};
  const double r4[] = {0.7869, 1.6263, 1.7925, 2.0731};
  for (std::size_t l = 0; l < 4; ++l) {
    CHECK(std::abs(f.profile.proportions[l] - pi4[l]) < 5e-4);
    CHECK(std::abs(f.profile.relativities[l] - r4[l]) < 5e-4);
  }
}

TEST_CASE("profile against adaptive integration of the closed-form stationary law") {
  for (const fixture::Tariff* t : {&fixture::coarse(), &fixture::fine()}) {
    for (std::size_t l = 0; l < 4; ++l) {
      auto pi_l = [&](double theta) {
        if (theta == 0.0) return l == 0 ? 1.0 : 0.0;
        return bms::closed_form_stationary_4level(t->lambda * theta, t->partition)[l];
      };
      const double mass = oracle::integrate_to_infinity([&](double th) { return pi_l(th) * std::exp(-th); }, 0.0);
      const double weighted =
          oracle::integrate_to_infinity([&](double th) { return th * pi_l(th) * std::exp(-th); }, 0.0);
      CHECK(std::abs(t->profile.proportions[l] - mass) < 1e-9);
      CHECK(std::abs(t->profile.relativities[l] - weighted / mass) < 1e-9);
    }
  }
}

TEST_CASE("global balance, monotone relativities and order doubling") {
  for (const fixture::Tariff* t : {&fixture::coarse(), &fixture::fine()}) {
    const auto& p = t->profile;
    double total = 0.0, balance = 0.0;
    for (std::size_t l = 0; l < 4; ++l) {
      CHECK(p.proportions[l] > 0.0);
      total += p.proportions[l];
      balance += p.proportions[l] * p.relativities[l];
      if (l > 0) CHECK(p.relativities[l] > p.relativities[l - 1]);
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    CHECK(std::abs(balance - 1.0) < 1e-6);

    bms::ProfileOptions doubled;
    doubled.order = 512;
    doubled.check_convergence = false;
    const auto q = bms::steady_state_profile(t->lambda, t->rules, t->partition, t->mixing, doubled);
    for (std::size_t l = 0; l < 4; ++l) {
      CHECK(std::abs(q.proportions[l] - p.proportions[l]) < 1e-8);
      CHECK(std::abs(q.relativities[l] - p.relativities[l]) < 1e-8);
    }
  }
}

TEST_CASE("homogeneous portfolio has unit relativities") {
  const auto& t = fixture::coarse();
  const auto p = bms::steady_state_profile(t.lambda, t.rules, t.partition, MixingDistribution::dirac());
  for (double r : p.relativities) CHECK(r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(p.malus_entry.has_value());
  CHECK(code_of([&] { bms::malus_entry_level(p.relativities); }) == ErrorCode::NoMalusZone);
}

TEST_CASE("gamma mixing keeps the global balance") {
  const auto& t = fixture::coarse();
  for (double shape : {0.7, 2.0, 10.0}) {
    const auto p =
        bms::steady_state_profile(t.lambda, t.rules, t.partition, MixingDistribution::gamma_unit_mean(shape));
    double balance = 0.0;
    for (std::size_t l = 0; l < 4; ++l) balance += p.proportions[l] * p.relativities[l];
    CHECK(std::abs(balance - 1.0) < 1e-6);
  }
}

TEST_CASE("malus entry level") {
  CHECK(bms::malus_entry_level(std::vector<double>{0.8050, 1.6543, 1.8899, 2.1844}) == 1);
  CHECK(bms::malus_entry_level(std::vector<double>{1.5, 2.0}) == 0);
  CHECK(code_of([] { bms::malus_entry_level(std::vector<double>{0.5, 0.9}); }) == ErrorCode::NoMalusZone);
}

TEST_CASE("invalid profile inputs") {
  const auto& t = fixture::coarse();
  CHECK(code_of([&] { bms::steady_state_profile(0.0, t.rules, t.partition, t.mixing); }) ==
        ErrorCode::InvalidArgument);
  bms::ProfileOptions coarse_rule;
  coarse_rule.order = 16;
  coarse_rule.convergence_tol = 1e-16;
  CHECK(code_of([&] { bms::steady_state_profile(t.lambda, t.rules, t.partition, t.mixing, coarse_rule); }) ==
        ErrorCode::QuadratureDivergence);
}

}  // TEST_SUITE
