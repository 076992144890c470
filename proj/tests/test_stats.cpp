#include <doctest.h>

#include <cmath>
#include <vector>

#include "lbr/errors.hpp"
#include "lbr/rng.hpp"
#include "lbr/stats.hpp"

using namespace lbr;
using doctest::Approx;

namespace {
std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  RandomSource r(RngStream{seed, 77});
  std::vector<double> x(n);
  for (auto& v : x) v = r.uniform();
  return x;
}
double unif_cdf(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

TEST_CASE("Kolmogorov survival function") {
  // Reference values of the limiting distribution.
  CHECK(kolmogorov_survival(1.0) == Approx(0.26999967).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.36) == Approx(0.04939).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.63) == Approx(0.00999).epsilon(2e-2));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  // both branches meet continuously
  CHECK(kolmogorov_survival(0.999999) == Approx(kolmogorov_survival(1.000001)).epsilon(1e-5));
}

TEST_CASE("KS one-sample: statistic by hand on a tiny sample") {
  std::vector<double> x;
  for (int i = 0; i < 100; ++i) x.push_back((i + 0.5) / 100);
  const auto r = ks_one_sample("grid", x, unif_cdf);
  CHECK(r.statistic == Approx(0.005));
  CHECK(r.passed);
}

TEST_CASE("KS controls: null accepted, shifted alternative rejected") {
  CHECK(ks_one_sample("null", uniforms(5000, 1), unif_cdf).passed);
  auto shifted = uniforms(5000, 2);
  for (auto& v : shifted) v = v * 0.9 + 0.1;
  CHECK_FALSE(ks_one_sample("shifted", shifted, unif_cdf).passed);
  CHECK(ks_two_sample("null2", uniforms(3000, 3), uniforms(3000, 4)).passed);
  CHECK_FALSE(ks_two_sample("alt2", uniforms(3000, 5), shifted).passed);
}

TEST_CASE("KS null rejection rate stays near the significance") {
  int rejected = 0;
  const int runs = 400;
  for (int k = 0; k < runs; ++k)
    rejected += !ks_one_sample("null", uniforms(200, 1000 + k), unif_cdf, 0.01).passed;
  CHECK(rejected <= 0.03 * runs);
  int rejected2 = 0;
  for (int k = 0; k < runs; ++k)
    rejected2 += !ks_two_sample("null", uniforms(200, 5000 + k), uniforms(300, 9000 + k), 0.01).passed;
  CHECK(rejected2 <= 0.03 * runs);
}

TEST_CASE("too few samples") {
  CHECK_THROWS_AS(ks_one_sample("small", uniforms(50, 1), unif_cdf), TooFewSamples);
  CHECK_THROWS_AS(ks_two_sample("small", uniforms(50, 1), uniforms(500, 2)), TooFewSamples);
}

TEST_CASE("chi-square Poisson test") {
  RandomSource r(RngStream{8, 8});
  std::vector<std::uint64_t> good(5000), bad(5000);
  for (auto& c : good) c = r.poisson(2.0);
  for (auto& c : bad) c = r.poisson(2.3);
  CHECK(chi_square_poisson("good", good, 2.0).passed);
  CHECK_FALSE(chi_square_poisson("bad", bad, 2.0).passed);
}

TEST_CASE("mean confidence interval and Bonferroni") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  const MeanCI ci = mc_mean_ci(x, 2.0);
  CHECK(ci.mean == Approx(3.0));
  CHECK(ci.std_error == Approx(std::sqrt(2.5 / 5)));
  CHECK(ci.upper - ci.lower == Approx(4 * ci.std_error));

  std::vector<TestReport> reps(4);
  reps[0].p_value = 0.004;
  reps[1].p_value = 0.5;
  reps[2].p_value = 0.3;
  reps[3].p_value = 0.0001;
  CHECK_FALSE(bonferroni(reps, 0.01));
  CHECK(reps[0].passed);
  CHECK_FALSE(reps[3].passed);
  CHECK(reps[0].significance == Approx(0.0025));
}

TEST_CASE("JSON serialization") {
  TestReport r{"t", 0.1, 0.5, 100, 0.01, true};
  r.metadata["seed"] = 7;
  const auto j = to_json(r);
  CHECK(j["name"] == "t");
  CHECK(j["passed"] == true);
  CHECK(j["metadata"]["seed"] == 7);
  TestReport q{"nan", std::nan(""), std::nan(""), 0, 0.01, true};
  CHECK(to_json_line(q).find("\"nan\"") != std::string::npos);
}
