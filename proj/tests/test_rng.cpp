#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "lbr/errors.hpp"
#include "lbr/rng.hpp"
#include "lbr/stats.hpp"

using namespace lbr;

TEST_CASE("identical streams give identical draws") {
  RandomSource a(RngStream{7, 3}), b(RngStream{7, 3});
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("children are distinct and reproducible") {
  const RngStream s{42, 0};
  std::set<std::uint64_t> first;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    RandomSource r(s.child(k));
    first.insert(r.engine()());
  }
  CHECK(first.size() == 1000);
  CHECK(s.child(5) == s.child(5));
  CHECK(!(s.child(5) == s.child(6)));
  CHECK(!(s.child(1).child(2) == s.child(2).child(1)));
}

TEST_CASE("uniform draws stay inside the open unit interval") {
  RandomSource r(RngStream{1, 1});
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0);
    REQUIRE(u < 1);
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
}

TEST_CASE("normal and exponential draws follow their laws") {
  RandomSource r(RngStream{2, 9});
  std::vector<double> n(20000), e(20000);
  for (auto& x : n) x = r.normal();
  for (auto& x : e) x = r.exponential();
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  CHECK(ks_one_sample("normal", n, phi).passed);
  CHECK(ks_one_sample("exp", e, [](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x); }).passed);
}

TEST_CASE("poisson counts match their law") {
  RandomSource r(RngStream{3, 1});
  std::vector<std::uint64_t> c(20000);
  for (auto& x : c) x = r.poisson(3.5);
  CHECK(chi_square_poisson("poisson", c, 3.5).passed);
  CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("stable alpha = 2 is a centred normal with variance 2") {
  RandomSource r(RngStream{4, 4});
  std::vector<double> x(20000);
  for (auto& v : x) v = r.stable(2.0);
  CHECK(ks_one_sample("stable2", x, [](double v) { return 0.5 * std::erfc(-v / 2.0); }).passed);
}

TEST_CASE("totally skewed stable draws have the right Laplace transform") {
  // E exp(u X) = exp(c_alpha u^alpha) with c_alpha = -1/cos(pi alpha/2).
  for (double alpha : {0.5, 1.5}) {
    RandomSource r(RngStream{5, static_cast<std::uint64_t>(alpha * 10)});
    const double u = 0.5;
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double v = std::exp(u * r.stable(alpha));
      s += v;
      s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    const double want = std::exp(-std::pow(u, alpha) / std::cos(M_PI * alpha / 2));
    CHECK(std::abs(mean - want) < 4 * se);
  }
  // alpha < 1: supported on the negative half-line
  RandomSource r(RngStream{6, 0});
  for (int i = 0; i < 10000; ++i) REQUIRE(r.stable(0.5) <= 0);
}
