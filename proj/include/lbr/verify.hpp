#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbr/levy_model.hpp"
#include "lbr/maxstable.hpp"
#include "lbr/stats.hpp"

namespace lbr {

enum class Suite { Margins, Stationarity, MaxStability, MmmEquivalence, Limits, Analytics };
std::optional<Suite> parse_suite(std::string_view name);
const char* suite_name(Suite s);

struct VerifyOptions {
  std::size_t replicas = 10000;
  std::uint64_t seed = 20240611;
  double significance = 0.01;
  unsigned workers = 0;
  double truncation_target = 1e-4;
};

struct SuiteReport {
  std::string suite;
  std::string config;
  std::vector<TestReport> reports;
  std::optional<std::string> skipped;
  bool passed() const;
};

// Runs one suite on `config`. The limits suite ignores the config (its
// models are fixed); the analytics suite uses it for the extremal index
// checks. Every report records the seed it used.
SuiteReport run_suite(Suite suite, const ParticleSystemConfig& config, const VerifyOptions& options = {});

// Building blocks, also used by the acceptance run. Each family of reports is
// Bonferroni-corrected to options.significance.

// One-sample Gumbel KS of eta(t) at every grid point.
std::vector<TestReport> margin_reports(const ParticleSystemConfig& config, Construction c, const TimeGrid& grid,
                                       const VerifyOptions& options);

// Two-sample comparison of the laws of (x0, x1) and (y0, y1): both margins,
// the pairwise minimum and the pairwise maximum.
std::vector<TestReport> pair_law_reports(const std::string& name, std::span<const double> x0,
                                         std::span<const double> x1, std::span<const double> y0,
                                         std::span<const double> y1, double significance);

std::vector<TestReport> max_stability_reports(const ParticleSystemConfig& config, Construction c, std::size_t n,
                                              const VerifyOptions& options);
std::vector<TestReport> stationarity_reports(const ParticleSystemConfig& config, const VerifyOptions& options);
std::vector<TestReport> mmm_equivalence_reports(const ParticleSystemConfig& config, const VerifyOptions& options);

// Limit-theorem experiments. Reports carrying metadata "criterion" = "limits"
// make up the desk-scale limit acceptance; the others are supplementary.
std::vector<TestReport> limit_reports(const VerifyOptions& options);

// rho, Theta, Theta(T)/T and the supremum law.
std::vector<TestReport> analytics_reports(const ParticleSystemConfig& config, const VerifyOptions& options);
TestReport rho_estimator_report(const ParticleSystemConfig& config, double t, std::size_t replicas,
                                const VerifyOptions& options);
TestReport theta_T_report(const ParticleSystemConfig& config, double T, const VerifyOptions& options);
// Needs a model without positive jumps and theta_minus > 0.
TestReport sup_law_report(const ParticleSystemConfig& config, const VerifyOptions& options);

// Which constructions apply to a configuration.
std::vector<Construction> applicable_constructions(const ParticleSystemConfig& config);

// eta of independent fields on `grid`; replica r uses RngStream{seed, id}.child(r).
std::vector<std::vector<double>> sample_fields(const ParticleSystemConfig& config, Construction c,
                                               const TimeGrid& grid, double a, std::uint64_t seed,
                                               std::uint64_t id, std::size_t replicas, unsigned workers);
double auto_truncation(const ParticleSystemConfig& config, Construction c, const TimeGrid& grid, double target);

}  // namespace lbr
