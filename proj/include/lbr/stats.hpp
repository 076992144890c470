#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbr {

struct TestReport {
  std::string name;
  double statistic = 0;
  double p_value = 1;
  std::size_t n_samples = 0;
  double significance = 0.01;
  bool passed = true;
  // Seeds, tolerances, skip reasons and other context.
  nlohmann::json metadata = nlohmann::json::object();
};

// P[K > lambda] for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

inline constexpr std::size_t kMinKsSamples = 100;

double standard_gumbel_cdf(double x);

// Requires at least kMinKsSamples samples (TooFewSamples otherwise).
TestReport ks_one_sample(std::string name, std::span<const double> samples,
                         const std::function<double(double)>& cdf, double significance = 0.01);
TestReport ks_two_sample(std::string name, std::span<const double> a, std::span<const double> b,
                         double significance = 0.01);

// Pearson chi-square of integer counts against Poisson(mean); tail cells are
// merged until each expected count is at least 5.
TestReport chi_square_poisson(std::string name, std::span<const std::uint64_t> counts, double mean,
                              double significance = 0.01);

struct MeanCI {
  double mean = 0;
  double std_error = 0;
  double lower = 0;
  double upper = 0;
};
// mean +- z * SE, with SE from the sample standard deviation.
MeanCI mc_mean_ci(std::span<const double> samples, double z = 3.0);

// Marks every report against significance / reports.size(); returns whether all pass.
bool bonferroni(std::vector<TestReport>& reports, double family_significance);

nlohmann::json to_json(const TestReport& report);
std::string to_json_line(const TestReport& report);

}  // namespace lbr
