#include <doctest.h>

#include <cmath>

#include "lbr/errors.hpp"
#include "lbr/point_fields.hpp"
#include "lbr/stats.hpp"

using namespace lbr;

TEST_CASE("Gumbel PPP: Poisson count and exponential exceedances") {
  const double a = 2.0;
  std::vector<std::uint64_t> counts;
  std::vector<double> excess;
  for (std::uint64_t r = 0; r < 3000; ++r) {
    RandomSource rng(RngStream{30, r});
    const auto s = sample_gumbel_ppp(a, rng);
    counts.push_back(s.points.size());
    for (double p : s.points) {
      REQUIRE(p > -a);
      excess.push_back(p + a);
    }
  }
  CHECK(chi_square_poisson("count", counts, std::exp(a)).passed);
  CHECK(ks_one_sample("excess", excess, [](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x); }).passed);
}

TEST_CASE("max of the Gumbel PPP is Gumbel above -a") {
  std::vector<double> m;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    RandomSource rng(RngStream{31, r});
    const auto s = sample_gumbel_ppp(6.0, rng);
    double best = -6.0;  // empty sample: max below the level
    for (double p : s.points) best = std::max(best, p);
    m.push_back(best);
  }
  CHECK(ks_one_sample("gumbel", m, standard_gumbel_cdf).passed);
}

TEST_CASE("space-time PPP: counts and uniform times") {
  std::vector<std::uint64_t> counts;
  std::vector<double> times;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    RandomSource rng(RngStream{32, r});
    const auto s = sample_spacetime_ppp({-1.0, 2.0}, 0.5, 1.0, rng);
    counts.push_back(s.points.size());
    for (const auto& p : s.points) {
      REQUIRE(p.time >= -1.0);
      REQUIRE(p.time <= 2.0);
      REQUIRE(p.position > -1.0);
      times.push_back(p.time);
    }
  }
  CHECK(chi_square_poisson("count", counts, 0.5 * 3 * std::exp(1.0)).passed);
  CHECK(ks_one_sample("times", times, [](double t) { return std::clamp((t + 1) / 3, 0.0, 1.0); }).passed);
  RandomSource rng(RngStream{1, 1});
  CHECK(sample_spacetime_ppp({0, 1}, 0.0, 3.0, rng).points.empty());
  CHECK_THROWS_AS(sample_spacetime_ppp({0, 1}, -1.0, 3.0, rng), DomainError);
}

TEST_CASE("truncation bound decreases in a and is tiny at a = 20") {
  const auto br = preset("brown-resnick");
  const auto g = TimeGrid::uniform(0, 1, 1.0 / 64);
  TruncationBoundOptions o;
  o.construction = Construction::TwoSided;
  double prev = 2;
  for (double a : {4.0, 8.0, 12.0, 20.0}) {
    const double b = truncation_error_bound(br, g, a, o);
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(prev < 1e-6);
  const double level = choose_truncation_level(br, g, 1e-4, o);
  CHECK(truncation_error_bound(br, g, level, o) < 1e-4);
  CHECK(truncation_error_bound(br, g, level - 0.5, o) >= 1e-4);
}

TEST_CASE("truncation bound is informative only for large a") {
  const auto c = preset("bm-killed");
  const auto g = TimeGrid::uniform(-0.5, 0.5, 0.25);
  CHECK(truncation_error_bound(c, g, 1.0) > 0.01);
  CHECK(truncation_error_bound(c, g, 12.0) < 1e-4);
  TruncationBoundOptions fixed;
  fixed.level = 0.0;
  CHECK(truncation_error_bound(c, g, 12.0, fixed) < truncation_error_bound(c, g, 6.0, fixed));
}
