#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lbr/errors.hpp"
#include "lbr/limits.hpp"
#include "lbr/parallel.hpp"
#include "lbr/stats.hpp"

using namespace lbr;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<double> column(const std::vector<SampledPath>& p, std::size_t k) {
  std::vector<double> out;
  for (const auto& x : p) out.push_back(x.values[k]);
  return out;
}

// Both grid points, Bonferroni-corrected to 0.01.
bool same_law(const std::vector<SampledPath>& a, const std::vector<SampledPath>& b) {
  std::vector<TestReport> r = {ks_two_sample("t0", column(a, 0), column(b, 0)),
                               ks_two_sample("t1", column(a, 1), column(b, 1))};
  for (const auto& x : r) MESSAGE(x.name << " p=" << x.p_value);
  return bonferroni(r, 0.01);
}
}  // namespace

TEST_CASE("normalization for drift-free Brownian motion") {
  const auto bm = LevyModel::brownian(1.0, 0.0);
  const auto p = make_normalization(bm, std::exp(10.0), 20.0);
  const double lambda_n = (10 - 0.5 * std::log(40 * pi)) / 20;  // theta = 1, psi'' = 1
  CHECK(p.theta == Approx(1.0).epsilon(1e-10));
  CHECK(p.lambda == Approx(0.5));
  CHECK(p.lambda_n == Approx(lambda_n).epsilon(1e-12));
  CHECK(p.b_n == Approx(std::sqrt(2 * lambda_n) * 20).epsilon(1e-10));
  CHECK(p.b_n == Approx(17.416).epsilon(1e-4));
  CHECK(make_normalization_for_rate(bm, std::exp(10.0), 0.5).theta == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normalization errors") {
  CHECK_THROWS_AS(make_normalization(LevyModel::compound_poisson(1, TwoPointLatticeJumps{1, 0.5}, 0), 1e4, 10),
                  LatticeModel);
  // negative exponential jumps: lambda_infinity = rate
  const auto m = LevyModel::compound_poisson(1.0, NegExponentialJumps{1.0}, 2.0);
  CHECK_THROWS_AS(make_normalization(m, 1e4, 1.0), DomainError);
  CHECK_NOTHROW(make_normalization(m, 1e4, 100.0));
}

TEST_CASE("alpha constants") {
  CHECK(alpha_constants(2.0, 1e4).theta_alpha == Approx(1.0).epsilon(1e-14));
  CHECK(alpha_constants(1.0, 1e4).theta_alpha == Approx(pi / 2).epsilon(1e-14));
  CHECK(alpha_constants(0.5, 1e4).theta_alpha == Approx(2.0).epsilon(1e-12));
  CHECK(alpha_constants(1.5, 1e4).theta_alpha == Approx(std::cbrt(2.0)).epsilon(1e-12));
  const double L = std::log(1e4);
  for (double a : {0.5, 1.5, 2.0}) {
    const auto c = alpha_constants(a, 1e4);
    CHECK(c.b_n_alpha == Approx((a / (a - 1) * L - 0.5 * std::log(2 * pi * a * L)) / c.theta_alpha));
  }
  const auto one = alpha_constants(1.0, 1e4);
  CHECK(one.b_n_alpha == Approx((2 / pi) * std::log(pi * std::exp(1.0) / 2) * L - std::log(2 * pi * L) / pi));
  CHECK(one.tilde_b(2.0) == Approx(one.b_n_alpha + 2 * (2 / pi) * L * std::log(L)));
  CHECK_THROWS_AS(alpha_constants(2.5, 1e4), DomainError);
}

TEST_CASE("generic b_n is close to the alpha-specific one") {
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    const auto p = make_normalization(LevyModel::stable(a), 1e4, std::log(1e4));
    const auto c = alpha_constants(a, 1e4);
    CHECK(p.theta == Approx(c.theta_alpha).epsilon(1e-9));
    INFO("alpha=" << a << " generic=" << p.b_n << " specific=" << c.b_n_alpha);
    CHECK(std::abs(p.b_n - c.b_n_alpha) < 1.0);
  }
}

TEST_CASE("ensemble of one path is that path minus b_n") {
  const auto bm = LevyModel::brownian(1.0, 0.0);
  const TimeGrid g({0.0, 0.5});
  const auto plan = make_normalization(bm, 100.0, 10.0);
  const auto e = ensemble_max(bm, 1, plan, g, RngStream{60, 0});
  RandomSource r(RngStream{60, 0}.child(0));
  std::vector<double> times = {10.0, 10.5}, v(2);
  evaluate_forward(bm, times, 0.0, r, v);
  CHECK(e.values[0] == Approx(v[0] - plan.b_n));
  CHECK(e.values[1] == Approx(v[1] - plan.b_n));
}

TEST_CASE("alpha = 2 stable experiment equals the Brownian one with sigma = sqrt 2") {
  const TimeGrid g({0.0, 1.0});
  const std::size_t R = 2000;
  const double b = alpha_constants(2.0, 100).b_n_alpha;
  const auto bm = LevyModel::brownian(std::sqrt(2.0), 0.0);
  NormalizationPlan plan;
  plan.s_n = std::log(100.0);
  plan.b_n = b;
  const auto s = parallel_map(R, [&](std::size_t r) {
    return stable_ensemble_experiment(2.0, 100, StableMode::LogShift, g, RngStream{61, r});
  });
  const auto w = parallel_map(R, [&](std::size_t r) { return ensemble_max(bm, 100, plan, g, RngStream{62, r}); });
  CHECK(same_law(s, w));
}

TEST_CASE("window and log-shift experiments agree in law") {
  const TimeGrid g({0.0, 1.0});
  const std::size_t R = 2000;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto a = parallel_map(R, [&](std::size_t r) {
      return stable_ensemble_experiment(alpha, 200, StableMode::LogShift, g, RngStream{63, r});
    });
    const auto b = parallel_map(R, [&](std::size_t r) {
      return stable_ensemble_experiment(alpha, 200, StableMode::InfinitesimalWindow, g, RngStream{64, r});
    });
    INFO("alpha=" << alpha);
    CHECK(same_law(a, b));
  }
}

TEST_CASE("OU process: margins and stationarity") {
  const TimeGrid g({0.0, 1.0});
  std::vector<double> z0, z1;
  for (std::uint64_t r = 0; r < 4000; ++r) {
    const auto p = ou_path(2.0, g, RngStream{65, r});
    z0.push_back(p.values[0]);
    z1.push_back(p.values[1]);
  }
  auto n02 = [](double x) { return 0.5 * std::erfc(-x / 2.0); };  // N(0, 2)
  std::vector<TestReport> margins = {ks_one_sample("Z(0)", z0, n02), ks_one_sample("Z(1)", z1, n02)};
  CHECK(bonferroni(margins, 0.01));
  for (double alpha : {0.5, 1.0, 1.5}) {
    std::vector<double> a, b;
    for (std::uint64_t r = 0; r < 3000; ++r) {
      const auto p = ou_path(alpha, g, RngStream{66, r});
      a.push_back(p.values[0]);
      b.push_back(p.values[1]);
    }
    INFO("alpha=" << alpha);
    CHECK(ks_two_sample("stationary", a, b).passed);
  }
}

TEST_CASE("limit motion and config") {
  const auto bm = LevyModel::brownian(1.0, 0.0);
  const auto c = limit_config(bm, 1.0);
  CHECK(laplace_exponent(c.model, 1.0) == Approx(0.0).epsilon(1e-14));
  const auto s = limit_config(LevyModel::stable(1.5), std::cbrt(2.0));
  CHECK(std::abs(laplace_exponent(s.model, 1.0)) < 1e-12);
}
