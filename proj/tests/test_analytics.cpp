#include <doctest.h>

#include <cmath>

#include "lbr/analytics.hpp"
#include "lbr/errors.hpp"
#include "lbr/verify.hpp"

using namespace lbr;
using doctest::Approx;

namespace {
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
}

TEST_CASE("Brown-Resnick rho(t) = 2 Phi(-sqrt(t)/2)") {
  const auto c = preset("brown-resnick");
  CHECK(extremal_correlation(c, 0.0).value == 1.0);
  CHECK(extremal_correlation(c, 4.0).value == Approx(2 * Phi(-1.0)).epsilon(1e-12));
  CHECK(extremal_correlation(c, 4.0).value == Approx(0.31731).epsilon(1e-5));
  for (double t : {0.1, 1.0, 9.0}) CHECK(extremal_correlation(c, t).value == Approx(2 * Phi(-std::sqrt(t) / 2)));
  CHECK_THROWS_AS(extremal_correlation(c, -1.0), DomainError);
}

TEST_CASE("rho closed forms agree with Monte Carlo") {
  RhoOptions o;
  o.replicas = 200000;
  for (const char* name : {"bm-killed", "poisson-jump"}) {
    const auto c = preset(name);
    for (double t : {0.5, 2.0}) {
      const auto exact = extremal_correlation(c, t);
      const auto mc = extremal_correlation_mc(c, t, o);
      INFO(name << " t=" << t << " exact=" << exact.value << " mc=" << mc.value);
      CHECK(std::abs(exact.value - mc.value) <= 4 * mc.std_error + 1e-12);
    }
  }
  // Deterministic drift c < 1... rho = e^{-theta+ t} - e^{-theta- t} (e^{ct} - 1)^+
  const auto d = make_config(LevyModel::deterministic(-0.5), 0.0);
  const double t = 1.3;
  const double want = std::exp(-d.theta_plus * t);
  CHECK(extremal_correlation(d, t).value == Approx(want));
}

TEST_CASE("rho is a nonincreasing [0,1] function for the presets") {
  for (const char* name : {"brown-resnick", "bm-killed", "poisson-jump"}) {
    const auto c = preset(name);
    double prev = 1.0;
    for (double t = 0; t <= 6; t += 0.5) {
      const double v = extremal_correlation(c, t).value;
      CHECK(v >= 0);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("rho estimator: errors and a known case") {
  std::vector<double> few(100, -1.0);
  CHECK_THROWS_AS(extremal_correlation_estimator(few, few), TooFewSamples);
  std::vector<double> none(10000, 1.0);
  CHECK_THROWS_AS(extremal_correlation_estimator(none, none), EstimationError);
  // Identical, standard Gumbel columns: P[eta < 0] = e^{-1}, rho = 1.
  std::vector<double> x(20000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -std::log(-std::log((i + 0.5) / x.size()));
  const auto e = extremal_correlation_estimator(x, x);
  CHECK(e.value == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("extremal index examples") {
  CHECK(extremal_index(preset("brown-resnick")) == Approx(0.5).epsilon(1e-12));
  CHECK(extremal_index(preset("bm-killed")) == Approx(2.0).epsilon(1e-12));
  // drift-free BM killed at rate 2: psi^{-1}(2) = 2, so Theta = 2 theta_plus
  const auto k = make_config(LevyModel::brownian(1.0, 0.0), 2.0);
  CHECK(extremal_index(k) == Approx(2 * k.theta_plus).epsilon(1e-12));
  CHECK_THROWS_AS(extremal_index(preset("poisson-jump")), PositiveJumps);
}

TEST_CASE("Theta(T)/T approaches Theta") {
  ThetaTOptions o;
  o.replicas = 4000;
  for (const char* name : {"brown-resnick", "bm-killed"}) {
    const auto c = preset(name);
    const auto e = theta_T_estimate(c, 32.0, o);
    INFO(name << " Theta(T)/T = " << e.theta_T / 32);
    CHECK(std::abs(e.theta_T / 32 - extremal_index(c)) < 0.1);
    CHECK(e.std_error > 0);
    CHECK(!e.f_curve.empty());
    CHECK(e.f_curve.front().f == Approx(1.0));
  }
}

TEST_CASE("Theta(T) direct estimate agrees with the change of measure") {
  const auto c = preset("bm-killed");
  ThetaTOptions o;
  o.replicas = 4000;
  const auto cm = theta_T_estimate(c, 2.0, o);
  const auto direct = theta_T_direct(c, 2.0, 1.0 / 64, 8.0, 4000, RngStream{50, 0});
  INFO("cm=" << cm.theta_T << " direct=" << direct.theta_T << " se=" << direct.std_error);
  // the grid version sees a slightly smaller supremum, hence a smaller Theta(T)
  CHECK(direct.theta_T <= cm.theta_T + 4 * std::hypot(cm.std_error, direct.std_error));
  CHECK(direct.theta_T >= 0.8 * cm.theta_T);
}

TEST_CASE("supremum law report passes for bm-killed") {
  VerifyOptions o;
  o.replicas = 3000;
  CHECK(sup_law_report(preset("bm-killed"), o).passed);
  CHECK_THROWS_AS(sup_law_report(preset("brown-resnick"), o), PreconditionError);
}
