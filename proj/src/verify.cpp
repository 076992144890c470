#include "lbr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "lbr/analytics.hpp"
#include "lbr/errors.hpp"
#include "lbr/format.hpp"
#include "lbr/limits.hpp"
#include "lbr/parallel.hpp"

namespace lbr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream ids of the experiments, so that reports can be reproduced one by one.
enum : std::uint64_t {
  kMarginStreams = 100,
  kMaxStabSingle = 200,
  kMaxStabMerged = 201,
  kStationarity = 300,
  kMmmBirthKill = 400,
  kMmmFields = 401,
  kLimitBase = 500,
  kRhoFields = 600,
  kThetaT = 601,
  kSupLaw = 602,
};

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][k];
  return out;
}

MaxStableField simulate(const ParticleSystemConfig& config, Construction c, const TimeGrid& grid, double a,
                        const RngStream& rng) {
  switch (c) {
    case Construction::TwoSided: return simulate_two_sided(config, grid, a, rng);
    case Construction::BirthKill: return simulate_birth_kill(config, grid, a, rng);
    case Construction::MMM: return simulate_mmm(config, grid, default_lookback(config), a, rng);
  }
  throw PreconditionError("unknown construction");
}

void tag(std::vector<TestReport>& reports, const nlohmann::json& meta) {
  for (auto& r : reports)
    for (auto it = meta.begin(); it != meta.end(); ++it) r.metadata[it.key()] = it.value();
}

TestReport info_report(std::string name, double statistic, bool passed, nlohmann::json meta) {
  TestReport r{std::move(name), statistic, kNaN, 0, 0, passed, std::move(meta)};
  return r;
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : {Suite::Margins, Suite::Stationarity, Suite::MaxStability, Suite::MmmEquivalence, Suite::Limits,
                  Suite::Analytics})
    if (name == suite_name(s)) return s;
  return std::nullopt;
}

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Margins: return "margins";
    case Suite::Stationarity: return "stationarity";
    case Suite::MaxStability: return "maxstability";
    case Suite::MmmEquivalence: return "mmm-equivalence";
    case Suite::Limits: return "limits";
    case Suite::Analytics: return "analytics";
  }
  return "?";
}

bool SuiteReport::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.passed; });
}

std::vector<Construction> applicable_constructions(const ParticleSystemConfig& config) {
  std::vector<Construction> out;
  if (config.theta_plus == 0 && config.theta_minus == 0) out.push_back(Construction::TwoSided);
  out.push_back(Construction::BirthKill);
  if (config.theta_plus > 0 && config.theta_minus > 0) out.push_back(Construction::MMM);
  return out;
}

double auto_truncation(const ParticleSystemConfig& config, Construction c, const TimeGrid& grid, double target) {
  TruncationBoundOptions opts;
  opts.construction = c;
  return choose_truncation_level(config, grid, target, opts);
}

std::vector<std::vector<double>> sample_fields(const ParticleSystemConfig& config, Construction c,
                                               const TimeGrid& grid, double a, std::uint64_t seed,
                                               std::uint64_t id, std::size_t replicas, unsigned workers) {
  const RngStream base{seed, id};
  return parallel_map(
      replicas, [&](std::size_t r) { return simulate(config, c, grid, a, base.child(r)).eta; }, workers);
}

std::vector<TestReport> margin_reports(const ParticleSystemConfig& config, Construction c, const TimeGrid& grid,
                                       const VerifyOptions& options) {
  const double a = auto_truncation(config, c, grid, options.truncation_target);
  const std::uint64_t id = kMarginStreams + static_cast<std::uint64_t>(c);
  const auto rows = sample_fields(config, c, grid, a, options.seed, id, options.replicas, options.workers);
  std::vector<TestReport> reports;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = column(rows, k);
    reports.push_back(ks_one_sample(std::string("margin ") + construction_name(c) + " t=" + format_real(grid[k]), x,
                                    standard_gumbel_cdf, options.significance));
  }
  bonferroni(reports, options.significance);
  tag(reports, {{"seed", options.seed}, {"stream", id}, {"a", a}, {"construction", construction_name(c)},
                {"config", config_summary(config)}});
  return reports;
}

std::vector<TestReport> pair_law_reports(const std::string& name, std::span<const double> x0,
                                         std::span<const double> x1, std::span<const double> y0,
                                         std::span<const double> y1, double significance) {
  auto combine = [](std::span<const double> p, std::span<const double> q, auto op) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = op(p[i], q[i]);
    return out;
  };
  auto mn = [](double u, double v) { return std::min(u, v); };
  auto mx = [](double u, double v) { return std::max(u, v); };
  std::vector<TestReport> reports;
  reports.push_back(ks_two_sample(name + " first margin", x0, y0, significance));
  reports.push_back(ks_two_sample(name + " second margin", x1, y1, significance));
  reports.push_back(ks_two_sample(name + " pair min", combine(x0, x1, mn), combine(y0, y1, mn), significance));
  reports.push_back(ks_two_sample(name + " pair max", combine(x0, x1, mx), combine(y0, y1, mx), significance));
  bonferroni(reports, significance);
  return reports;
}

std::vector<TestReport> max_stability_reports(const ParticleSystemConfig& config, Construction c, std::size_t n,
                                              const VerifyOptions& options) {
  const TimeGrid grid({0.0, 0.5});
  const double a = auto_truncation(config, c, grid, options.truncation_target);
  const auto single = sample_fields(config, c, grid, a, options.seed, kMaxStabSingle, options.replicas,
                                    options.workers);
  const RngStream merged_base{options.seed, kMaxStabMerged};
  const auto merged = parallel_map(
      options.replicas,
      [&](std::size_t r) {
        std::vector<MaxStableField> fields;
        for (std::size_t k = 0; k < n; ++k) fields.push_back(simulate(config, c, grid, a, merged_base.child(r).child(k)));
        return max_stability_transform(fields).eta;
      },
      options.workers);
  auto reports = pair_law_reports(std::string("max-stability n=") + std::to_string(n) + " " + construction_name(c),
                                  column(merged, 0), column(merged, 1), column(single, 0), column(single, 1),
                                  options.significance);
  tag(reports, {{"seed", options.seed}, {"a", a}, {"n", n}, {"times", {0.0, 0.5}},
                {"config", config_summary(config)}});
  return reports;
}

std::vector<TestReport> stationarity_reports(const ParticleSystemConfig& config, const VerifyOptions& options) {
  const TimeGrid grid = TimeGrid::uniform(-0.5, 1.25, 0.25);
  const double shifts[] = {0.0, 0.5, 1.0};
  const double a = auto_truncation(config, Construction::BirthKill, grid, options.truncation_target);
  // Replica r contributes only to group r mod 3, so the groups are independent.
  const auto rows = sample_fields(config, Construction::BirthKill, grid, a, options.seed, kStationarity,
                                  3 * options.replicas, options.workers);
  std::vector<double> first[3], second[3];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t g = r % 3;
    first[g].push_back(rows[r][grid.index_of(shifts[g])]);
    second[g].push_back(rows[r][grid.index_of(shifts[g] + 0.25)]);
  }
  std::vector<TestReport> reports;
  for (std::size_t g = 1; g < 3; ++g) {
    auto part = pair_law_reports("stationarity s=" + format_real(shifts[g]) + " vs s=0", first[g], second[g],
                                 first[0], second[0], options.significance);
    reports.insert(reports.end(), part.begin(), part.end());
  }
  bonferroni(reports, options.significance);
  tag(reports, {{"seed", options.seed}, {"stream", kStationarity}, {"a", a}, {"lag", 0.25},
                {"construction", "birth-kill"}, {"config", config_summary(config)}});
  return reports;
}

std::vector<TestReport> mmm_equivalence_reports(const ParticleSystemConfig& config, const VerifyOptions& options) {
  const TimeGrid grid({0.0, 0.5});
  const double a_bk = auto_truncation(config, Construction::BirthKill, grid, options.truncation_target);
  const double a_mmm = auto_truncation(config, Construction::MMM, grid, options.truncation_target);
  const auto bk = sample_fields(config, Construction::BirthKill, grid, a_bk, options.seed, kMmmBirthKill,
                                options.replicas, options.workers);
  const auto mm = sample_fields(config, Construction::MMM, grid, a_mmm, options.seed, kMmmFields, options.replicas,
                                options.workers);
  auto reports = pair_law_reports("birth-kill vs mmm", column(bk, 0), column(bk, 1), column(mm, 0), column(mm, 1),
                                  options.significance);
  tag(reports, {{"seed", options.seed}, {"a_birth_kill", a_bk}, {"a_mmm", a_mmm},
                {"lookback", default_lookback(config)}, {"times", {0.0, 0.5}}, {"config", config_summary(config)}});
  return reports;
}

namespace {

// Replicated normalized ensemble maxima; replica r uses RngStream{seed, id}.child(r).
template <class F>
std::vector<std::vector<double>> replicate(std::size_t replicas, std::uint64_t seed, std::uint64_t id, unsigned workers,
                                           F&& experiment) {
  const RngStream base{seed, id};
  return parallel_map(
      replicas, [&](std::size_t r) { return experiment(base.child(r)).values; }, workers);
}

struct LimitExperiment {
  std::string name;
  // Normalized ensemble max on `grid` for ensemble size n.
  std::function<SampledPath(std::uint64_t n, const RngStream&)> run;
  // Maps the output at time t to a statistic whose limit is eta(t).
  std::function<double(double value, double t)> to_eta;
  ParticleSystemConfig limit;  // config of the limit field eta
};

// KS against Gumbel at t = 0 along n, the decreasing-KS check, and the pair
// law against the limit field at n = 10^4.
void run_limit_experiment(const LimitExperiment& e, const TimeGrid& grid, std::uint64_t id,
                          const VerifyOptions& options, std::vector<TestReport>& out,
                          std::vector<std::vector<double>>* largest = nullptr) {
  const std::uint64_t sizes[] = {100, 1000, 10000};
  double ks[3] = {};
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 3; ++k) {
    rows = replicate(options.replicas, options.seed, id + static_cast<std::uint64_t>(k), options.workers,
                     [&](const RngStream& s) { return e.run(sizes[k], s); });
    std::vector<double> x0(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) x0[r] = e.to_eta(rows[r][0], grid[0]);
    TestReport rep = ks_one_sample(e.name + " Gumbel at t=0 n=" + std::to_string(sizes[k]), x0, standard_gumbel_cdf,
                                   options.significance);
    ks[k] = rep.statistic;
    rep.metadata["seed"] = options.seed;
    rep.metadata["stream"] = id + static_cast<std::uint64_t>(k);
    rep.metadata["n"] = sizes[k];
    if (sizes[k] == 10000) rep.metadata["criterion"] = "limits";
    out.push_back(std::move(rep));
  }
  out.push_back(info_report(e.name + " KS decreasing along n", ks[2], ks[0] > ks[1] && ks[1] > ks[2],
                            {{"ks", {ks[0], ks[1], ks[2]}}, {"n", {100, 1000, 10000}}, {"criterion", "limits"}}));

  // rows holds n = 10^4.
  const std::size_t j = grid.index_of(1.0);
  std::vector<double> x0(rows.size()), x1(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x0[r] = e.to_eta(rows[r][0], grid[0]);
    x1[r] = e.to_eta(rows[r][j], 1.0);
  }
  const TimeGrid pair({0.0, 1.0});
  const Construction c = Construction::TwoSided;
  const double a = auto_truncation(e.limit, c, pair, options.truncation_target);
  const auto lim = sample_fields(e.limit, c, pair, a, options.seed, id + 10, options.replicas, options.workers);
  auto reports = pair_law_reports(e.name + " pair (0,1) vs limit field n=10000", x0, x1, column(lim, 0),
                                  column(lim, 1), options.significance);
  tag(reports, {{"seed", options.seed}, {"stream", id + 10}, {"a", a}, {"limit_config", config_summary(e.limit)},
                {"criterion", "limits"}});
  out.insert(out.end(), reports.begin(), reports.end());
  if (largest) *largest = std::move(rows);
}

}  // namespace

std::vector<TestReport> limit_reports(const VerifyOptions& options) {
  std::vector<TestReport> out;
  constexpr double pi = std::numbers::pi;

  // Constants theta_alpha against direct evaluations.
  {
    const double expected[] = {2.0, pi / 2, std::cbrt(2.0), 1.0};
    const double alphas[] = {0.5, 1.0, 1.5, 2.0};
    for (int k = 0; k < 4; ++k) {
      const double got = alpha_constants(alphas[k], 1e4).theta_alpha;
      const double err = std::abs(got - expected[k]);
      out.push_back(info_report("theta_alpha alpha=" + format_real(alphas[k]), got, err < 1e-12,
                                {{"expected", expected[k]}, {"abs_error", err}, {"criterion", "limits"}}));
    }
  }

  // Brownian motion, lambda = 1/2 so theta = 1 and s_n = 2 log n.
  {
    const LevyModel bm = LevyModel::brownian(1.0, 0.0);
    const double lambda = 0.5;
    const double theta = make_normalization_for_rate(bm, 1e4, lambda).theta;
    const double psi = laplace_exponent(bm, theta);
    const TimeGrid grid({0.0, 0.5, 1.0});
    LimitExperiment e{"brownian lambda=1/2",
                      [&](std::uint64_t n, const RngStream& s) {
                        return ensemble_max(bm, n, make_normalization_for_rate(bm, static_cast<double>(n), lambda),
                                            grid, s);
                      },
                      [=](double v, double t) { return theta * v - psi * t; }, limit_config(bm, theta)};
    std::vector<std::vector<double>> rows;
    run_limit_experiment(e, grid, kLimitBase, options, out, &rows);
    // theta (M_n(t) - M_n(0)) has mean psi(theta) t in the limit.
    for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
      std::vector<double> d(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) d[r] = theta * (rows[r][k] - rows[r][0]);
      const MeanCI ci = mc_mean_ci(d, 3.0);
      const double target = psi * grid[k];
      out.push_back(info_report("brownian drift identity t=" + format_real(grid[k]), ci.mean,
                                ci.lower <= target && target <= ci.upper,
                                {{"target", target}, {"std_error", ci.std_error}, {"n", 10000}}));
    }
  }

  // alpha-stable, log-shift normalization.
  const double alphas[] = {0.5, 1.0, 1.5, 2.0};
  const TimeGrid grid01({0.0, 1.0});
  for (int k = 0; k < 4; ++k) {
    const double alpha = alphas[k];
    const LevyModel model = LevyModel::stable(alpha);
    const AlphaNormalization c = alpha_constants(alpha, 1e4);
    const double theta = c.theta_alpha;
    const double psi = laplace_exponent(model, theta);
    LimitExperiment e{"stable alpha=" + format_real(alpha) + " log-shift",
                      [=](std::uint64_t n, const RngStream& s) {
                        return stable_ensemble_experiment(alpha, n, StableMode::LogShift, grid01, s);
                      },
                      [=](double v, double t) { return theta * v - psi * t; }, limit_config(model, theta)};
    std::vector<std::vector<double>> rows;
    const std::uint64_t id = kLimitBase + 20 * static_cast<std::uint64_t>(k + 1);
    run_limit_experiment(e, grid01, id, options, out, &rows);

    // The generic b_n on the same samples.
    const double b_generic = make_normalization(model, 1e4, std::log(1e4)).b_n;
    std::vector<double> x0(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) x0[r] = theta * (rows[r][0] + c.b_n_alpha - b_generic);
    TestReport g = ks_one_sample(e.name + " generic b_n Gumbel at t=0 n=10000", x0, standard_gumbel_cdf,
                                 options.significance);
    g.metadata["b_n_alpha"] = c.b_n_alpha;
    g.metadata["b_n_generic"] = b_generic;
    g.metadata["seed"] = options.seed;
    out.push_back(std::move(g));
  }

  // Self-similarity: the window and log-shift experiments agree in law.
  for (int k = 0; k < 3; ++k) {
    const double alpha = alphas[k];
    const std::uint64_t id = kLimitBase + 200 + 2 * static_cast<std::uint64_t>(k);
    auto run = [&](StableMode mode, std::uint64_t stream) {
      return replicate(options.replicas, options.seed, stream, options.workers, [&](const RngStream& s) {
        return stable_ensemble_experiment(alpha, 1000, mode, grid01, s);
      });
    };
    const auto shift = run(StableMode::LogShift, id);
    const auto window = run(StableMode::InfinitesimalWindow, id + 1);
    auto reports = pair_law_reports("stable alpha=" + format_real(alpha) + " window vs log-shift n=1000",
                                    column(window, 0), column(window, 1), column(shift, 0), column(shift, 1),
                                    options.significance);
    tag(reports, {{"seed", options.seed}, {"stream", id}});
    out.insert(out.end(), reports.begin(), reports.end());
  }

  // Stationary stable OU process, alpha = 2.
  {
    const double alpha = 2.0;
    const LevyModel model = LevyModel::stable(alpha);
    const double theta = alpha_constants(alpha, 1e4).theta_alpha;
    LimitExperiment e{"ou alpha=2",
                      [=](std::uint64_t n, const RngStream& s) { return ou_ensemble_experiment(alpha, n, grid01, s); },
                      [=](double v, double) { return theta * v; }, limit_config(model, theta)};
    run_limit_experiment(e, grid01, kLimitBase + 300, options, out);
  }
  return out;
}

TestReport rho_estimator_report(const ParticleSystemConfig& config, double t, std::size_t replicas,
                                const VerifyOptions& options) {
  const TimeGrid grid({0.0, t});
  const Construction c = config.theta_plus == 0 && config.theta_minus == 0 ? Construction::TwoSided
                                                                            : Construction::BirthKill;
  const double a = auto_truncation(config, c, grid, options.truncation_target);
  const auto rows = sample_fields(config, c, grid, a, options.seed, kRhoFields, replicas, options.workers);
  const RhoEstimate est = extremal_correlation_estimator(column(rows, 0), column(rows, 1));
  const RhoValue exact = extremal_correlation(config, t);
  const double se = std::hypot(est.std_error, exact.std_error);
  const double z = std::abs(est.value - exact.value) / se;
  TestReport r{"rho(" + format_real(t) + ") estimator within 3 SE", est.value, kNaN, replicas, 0, z <= 3.0,
               {{"analytic", exact.value},
                {"method", rho_method_name(exact.method)},
                {"std_error", est.std_error},
                {"z", z},
                {"a", a},
                {"seed", options.seed},
                {"stream", kRhoFields},
                {"config", config_summary(config)}}};
  return r;
}

TestReport theta_T_report(const ParticleSystemConfig& config, double T, const VerifyOptions& options) {
  ThetaTOptions o;
  o.replicas = options.replicas;
  o.rng = RngStream{options.seed, kThetaT};
  const ThetaTEstimate e = theta_T_estimate(config, T, o);
  const double theta = extremal_index(config);
  const double ratio = e.theta_T / T;
  return TestReport{"Theta(T)/T at T=" + format_real(T) + " within 0.1 of Theta",
                    ratio,
                    kNaN,
                    options.replicas,
                    0,
                    std::abs(ratio - theta) <= 0.1,
                    {{"Theta", theta},
                     {"theta_T", e.theta_T},
                     {"std_error", e.std_error},
                     {"coarse_theta_T", e.coarse_theta_T},
                     {"refinement_flag", e.refinement_flag},
                     {"seed", options.seed},
                     {"config", config_summary(config)}}};
}

TestReport sup_law_report(const ParticleSystemConfig& config, const VerifyOptions& options) {
  if (has_positive_jumps(config.model) || !(config.theta_minus > 0))
    throw PreconditionError("the supremum law needs no positive jumps and theta_minus > 0");
  const double rate = psi_inverse(config.model, config.theta_minus);
  const RngStream base{options.seed, kSupLaw};
  const auto sups = parallel_map(
      options.replicas,
      [&](std::size_t r) {
        RandomSource rng(base.child(r));
        return sample_supremum(config.model, kInf, 1.0 / 256, config.theta_minus, rng);
      },
      options.workers);
  TestReport rep = ks_one_sample("sup of killed motion ~ Exp(" + format_real(rate) + ")", sups,
                                 [rate](double x) { return x <= 0 ? 0.0 : -std::expm1(-rate * x); },
                                 options.significance);
  rep.metadata["seed"] = options.seed;
  rep.metadata["stream"] = kSupLaw;
  rep.metadata["rate"] = rate;
  rep.metadata["config"] = config_summary(config);
  return rep;
}

std::vector<TestReport> analytics_reports(const ParticleSystemConfig& config, const VerifyOptions& options) {
  std::vector<TestReport> out;
  const RhoValue r0 = extremal_correlation(config, 0.0);
  out.push_back(info_report("rho(0) = 1", r0.value, r0.value == 1.0, {{"config", config_summary(config)}}));
  out.push_back(rho_estimator_report(config, 4.0, 10 * options.replicas, options));
  if (!has_positive_jumps(config.model)) {
    out.push_back(theta_T_report(config, 32.0, options));
    if (config.theta_minus > 0) out.push_back(sup_law_report(config, options));
  }
  return out;
}

SuiteReport run_suite(Suite suite, const ParticleSystemConfig& config, const VerifyOptions& options) {
  SuiteReport rep{suite_name(suite), config_summary(config), {}, std::nullopt};
  auto add = [&](std::vector<TestReport> part) { rep.reports.insert(rep.reports.end(), part.begin(), part.end()); };
  switch (suite) {
    case Suite::Margins: {
      const TimeGrid grid({-0.5, 0.0, 0.5});
      for (Construction c : applicable_constructions(config)) add(margin_reports(config, c, grid, options));
      break;
    }
    case Suite::Stationarity: add(stationarity_reports(config, options)); break;
    case Suite::MaxStability: {
      const Construction c = applicable_constructions(config).front();
      add(max_stability_reports(config, c, 5, options));
      break;
    }
    case Suite::MmmEquivalence:
      if (!(config.theta_plus > 0 && config.theta_minus > 0)) {
        rep.skipped = "mixed moving maxima need theta_plus > 0 and theta_minus > 0";
        break;
      }
      add(mmm_equivalence_reports(config, options));
      break;
    case Suite::Limits: add(limit_reports(options)); break;
    case Suite::Analytics: add(analytics_reports(config, options)); break;
  }
  return rep;
}

}  // namespace lbr
