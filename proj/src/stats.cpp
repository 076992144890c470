#include "lbr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "lbr/errors.hpp"

namespace lbr {

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    // Theta-function form converges fast for small lambda.
    double cdf = 0;
    const double c = -pi * pi / (8 * lambda * lambda);
    for (int k = 1; k <= 20; ++k) cdf += std::exp(c * (2 * k - 1) * (2 * k - 1));
    return std::clamp(1 - std::sqrt(2 * pi) / lambda * cdf, 0.0, 1.0);
  }
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2 : -2) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

double standard_gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

namespace {

// Stephens' small-sample correction to the asymptotic distribution.
double ks_p_value(double d, double effective_n) {
  const double r = std::sqrt(effective_n);
  return kolmogorov_survival((r + 0.12 + 0.11 / r) * d);
}

void finish(TestReport& r) { r.passed = r.p_value >= r.significance; }

}  // namespace

TestReport ks_one_sample(std::string name, std::span<const double> samples,
                         const std::function<double(double)>& cdf, double significance) {
  if (samples.size() < kMinKsSamples)
    throw TooFewSamples("KS test '" + name + "' needs at least " + std::to_string(kMinKsSamples) + " samples, got " +
                        std::to_string(samples.size()));
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  TestReport r{std::move(name), d, ks_p_value(d, n), x.size(), significance};
  r.metadata["test"] = "ks_one_sample";
  finish(r);
  return r;
}

TestReport ks_two_sample(std::string name, std::span<const double> a, std::span<const double> b,
                         double significance) {
  if (a.size() < kMinKsSamples || b.size() < kMinKsSamples)
    throw TooFewSamples("two-sample KS test '" + name + "' needs at least " + std::to_string(kMinKsSamples) +
                        " samples per side");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  TestReport r{std::move(name), d, ks_p_value(d, n * m / (n + m)), x.size() + y.size(), significance};
  r.metadata["test"] = "ks_two_sample";
  r.metadata["sizes"] = {x.size(), y.size()};
  finish(r);
  return r;
}

TestReport chi_square_poisson(std::string name, std::span<const std::uint64_t> counts, double mean,
                              double significance) {
  if (counts.size() < kMinKsSamples)
    throw TooFewSamples("chi-square test '" + name + "' needs at least " + std::to_string(kMinKsSamples) +
                        " samples");
  if (!(mean > 0)) throw DomainError("Poisson mean must be positive");
  const double total = static_cast<double>(counts.size());
  const std::uint64_t top = *std::max_element(counts.begin(), counts.end());
  std::vector<double> observed(top + 2, 0.0);
  for (auto c : counts) observed[c] += 1;

  // Cells [lo, hi) over k; the last cell absorbs the upper tail.
  std::vector<double> obs_cells, exp_cells;
  double obs_acc = 0, exp_acc = 0, pmf = std::exp(-mean), cdf = 0;
  for (std::uint64_t k = 0; k <= top; ++k) {
    if (k > 0) pmf *= mean / static_cast<double>(k);
    cdf += pmf;
    obs_acc += observed[k];
    exp_acc += total * pmf;
    if (exp_acc >= 5 && total * (1 - cdf) >= 5) {
      obs_cells.push_back(obs_acc);
      exp_cells.push_back(exp_acc);
      obs_acc = exp_acc = 0;
    }
  }
  exp_acc += total * std::max(0.0, 1 - cdf);
  if (!obs_cells.empty() && exp_acc < 5) {
    obs_cells.back() += obs_acc;
    exp_cells.back() += exp_acc;
  } else {
    obs_cells.push_back(obs_acc);
    exp_cells.push_back(exp_acc);
  }
  double stat = 0;
  for (std::size_t c = 0; c < obs_cells.size(); ++c) {
    const double diff = obs_cells[c] - exp_cells[c];
    stat += diff * diff / exp_cells[c];
  }
  const double dof = static_cast<double>(obs_cells.size()) - 1;
  const double p = dof > 0 ? boost::math::gamma_q(dof / 2, stat / 2) : 1.0;
  TestReport r{std::move(name), stat, p, counts.size(), significance};
  r.metadata["test"] = "chi_square_poisson";
  r.metadata["cells"] = obs_cells.size();
  r.metadata["mean"] = mean;
  finish(r);
  return r;
}

MeanCI mc_mean_ci(std::span<const double> samples, double z) {
  if (samples.size() < 2) throw TooFewSamples("a confidence interval needs at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1) / n);
  return {mean, se, mean - z * se, mean + z * se};
}

bool bonferroni(std::vector<TestReport>& reports, double family_significance) {
  bool all = true;
  const double each = family_significance / static_cast<double>(std::max<std::size_t>(reports.size(), 1));
  for (auto& r : reports) {
    r.significance = each;
    r.metadata["bonferroni_family_significance"] = family_significance;
    r.metadata["bonferroni_tests"] = reports.size();
    finish(r);
    all = all && r.passed;
  }
  return all;
}

nlohmann::json to_json(const TestReport& report) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  return {{"name", report.name},
          {"statistic", num(report.statistic)},
          {"p_value", num(report.p_value)},
          {"n_samples", report.n_samples},
          {"significance", report.significance},
          {"passed", report.passed},
          {"metadata", report.metadata}};
}

std::string to_json_line(const TestReport& report) { return to_json(report).dump(); }

}  // namespace lbr
