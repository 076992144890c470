#include "lbr/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"
#include "lbr/parallel.hpp"
#include "lbr/paths.hpp"

namespace lbr {

const char* rho_method_name(RhoMethod m) {
  switch (m) {
    case RhoMethod::ClosedForm: return "closed-form";
    case RhoMethod::Quadrature: return "quadrature";
    case RhoMethod::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_poisson_pmf(double mean, std::uint64_t k) {
  const double kk = static_cast<double>(k);
  return -mean + kk * std::log(mean) - std::lgamma(kk + 1);
}

// E (e^{c + S} - 1)^+ for S a sum of k jumps.
double positive_part_given_jumps(const JumpDist& jumps, std::uint64_t k, double c) {
  using boost::math::gamma_p;
  using boost::math::gamma_q;
  if (k == 0) return std::max(std::exp(c) - 1, 0.0);
  const double kk = static_cast<double>(k);
  if (const auto* e = std::get_if<ExponentialJumps>(&jumps)) {
    const double m = e->mean;
    if (c >= 0) return std::exp(c) * std::pow(1 - m, -kk) - 1;
    const double y = -c;
    return std::exp(c - kk * std::log1p(-m)) * gamma_q(kk, y * (1 - m) / m) - gamma_q(kk, y / m);
  }
  if (const auto* n = std::get_if<NegExponentialJumps>(&jumps)) {
    const double m = n->mean;
    if (c <= 0) return 0.0;
    return std::exp(c - kk * std::log1p(m)) * gamma_p(kk, c * (1 + m) / m) - gamma_p(kk, c / m);
  }
  const auto& l = std::get<TwoPointLatticeJumps>(jumps);
  double sum = 0;
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double x = c + l.step * (2.0 * static_cast<double>(j) - kk);
    if (x <= 0) continue;
    double logw;
    if (l.p_up >= 1)
      logw = j == k ? 0.0 : -kInf;
    else if (l.p_up <= 0)
      logw = j == 0 ? 0.0 : -kInf;
    else
      logw = std::lgamma(kk + 1) - std::lgamma(static_cast<double>(j) + 1) - std::lgamma(kk - static_cast<double>(j) + 1) +
             static_cast<double>(j) * std::log(l.p_up) + (kk - static_cast<double>(j)) * std::log1p(-l.p_up);
    if (logw > -kInf) sum += std::exp(logw) * std::expm1(x);
  }
  return sum;
}

// E (e^{xi(t)} - 1)^+ for a compound Poisson motion, summed over the jump count.
double compound_poisson_positive_part(const CompoundPoissonDrift& m, double t) {
  const double mean = m.rate * t;
  const double c = m.drift * t;
  const double spread = 12 * std::sqrt(mean) + 30;
  const auto lo = static_cast<std::uint64_t>(std::max(0.0, std::floor(mean - spread)));
  const auto hi = static_cast<std::uint64_t>(std::ceil(mean + spread));
  double sum = 0;
  for (std::uint64_t k = lo; k <= hi; ++k) {
    const double w = std::exp(log_poisson_pmf(mean, k));
    if (w == 0) continue;
    sum += w * positive_part_given_jumps(m.jumps, k, c);
  }
  return sum;
}

void check_time(double t) {
  if (!(t >= 0) || !std::isfinite(t))
    throw DomainError("rho(t) needs t >= 0; by stationarity rho(-t) = rho(t)");
}

}  // namespace

RhoValue extremal_correlation_mc(const ParticleSystemConfig& config, double t, const RhoOptions& options) {
  validate(config);
  check_time(t);
  if (t == 0) return {0.0, 1.0, RhoMethod::ClosedForm, 0.0};
  const std::size_t R = std::max<std::size_t>(options.replicas, 2);
  const auto draws = parallel_map(R, [&](std::size_t r) {
    RandomSource rng(options.rng.child(r));
    return std::max(std::expm1(sample_increment(config.model, t, rng)), 0.0);
  });
  double mean = 0, sq = 0;
  for (double d : draws) mean += d;
  mean /= static_cast<double>(R);
  for (double d : draws) sq += (d - mean) * (d - mean);
  const double sd = std::sqrt(sq / static_cast<double>(R - 1));
  const double km = std::exp(-config.theta_minus * t);
  const double value = std::exp(-config.theta_plus * t) - km * mean;
  return {t, std::clamp(value, 0.0, 1.0), RhoMethod::MonteCarlo, km * sd / std::sqrt(static_cast<double>(R))};
}

RhoValue extremal_correlation(const ParticleSystemConfig& config, double t, const RhoOptions& options) {
  validate(config);
  check_time(t);
  if (t == 0) return {0.0, 1.0, RhoMethod::ClosedForm, 0.0};
  const double kp = std::exp(-config.theta_plus * t);
  const double km = std::exp(-config.theta_minus * t);
  if (const auto* b = config.model.as<BrownianDrift>()) {
    const double m = b->drift * t;
    const double s = b->sigma * std::sqrt(t);
    const double value = kp * normal_cdf(-(m + s * s) / s) + km * normal_cdf(m / s);
    return {t, std::clamp(value, 0.0, 1.0), RhoMethod::ClosedForm, 0.0};
  }
  if (const auto* d = config.model.as<Deterministic>()) {
    const double value = kp - km * std::max(std::expm1(d->drift * t), 0.0);
    return {t, std::clamp(value, 0.0, 1.0), RhoMethod::ClosedForm, 0.0};
  }
  if (const auto* cp = config.model.as<CompoundPoissonDrift>()) {
    const double value = kp - km * compound_poisson_positive_part(*cp, t);
    return {t, std::clamp(value, 0.0, 1.0), RhoMethod::Quadrature, 0.0};
  }
  return extremal_correlation_mc(config, t, options);
}

RhoEstimate extremal_correlation_estimator(std::span<const double> eta0, std::span<const double> etat) {
  if (eta0.size() != etat.size()) throw DomainError("estimator needs paired samples");
  const std::size_t R = eta0.size();
  if (R < 10000) throw TooFewSamples("the extremal correlation estimator needs at least 1e4 replicas");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < R; ++i) hits += (eta0[i] < 0 && etat[i] < 0);
  if (hits == 0) throw EstimationError("no replica has both values below 0; the estimator is undefined");
  const double p = static_cast<double>(hits) / static_cast<double>(R);
  return {2 + std::log(p), std::sqrt(p * (1 - p) / static_cast<double>(R)) / p, p, R};
}

RhoEstimate extremal_correlation_estimator(std::span<const MaxStableField> fields, double t) {
  std::vector<double> a, b;
  a.reserve(fields.size());
  b.reserve(fields.size());
  for (const auto& f : fields) {
    a.push_back(f.eta[f.grid.index_of(0.0)]);
    b.push_back(f.eta[f.grid.index_of(t)]);
  }
  return extremal_correlation_estimator(a, b);
}

double extremal_index(const ParticleSystemConfig& config) {
  validate(config);
  if (has_positive_jumps(config.model))
    throw PositiveJumps("the extremal index formula needs a motion without positive jumps: " +
                        config.model.describe());
  if (config.theta_plus == 0) return psi_derivatives(config.model, 1.0).first;
  const double u = psi_inverse(config.model, config.theta_minus);
  return u / (u - 1) * config.theta_plus;
}

namespace {

struct ThetaRun {
  double theta_T;
  double std_error;
  std::vector<FPoint> f_curve;
};

// Per-path contribution to Theta(T) and to f at the reported points.
struct PathTerms {
  double total = 0;
  std::vector<double> f_values;
};

ThetaRun run_theta(const ParticleSystemConfig& config, double T, int level, ThetaTMethod method,
                   const ThetaTOptions& opt, const RngStream& stream) {
  const auto steps = static_cast<std::size_t>(1) << level;
  const double h = T / static_cast<double>(steps);
  const std::size_t nf = std::max<std::size_t>(opt.f_points, 2);
  std::vector<std::size_t> f_index(nf);
  for (std::size_t j = 0; j < nf; ++j) f_index[j] = (j * steps) / (nf - 1);

  const bool cm = method == ThetaTMethod::ChangeOfMeasure;
  const double ustar = cm ? psi_inverse(config.model, config.theta_minus) : 0;
  const LevyModel motion = cm ? esscher_tilt(config.model, ustar) : config.model;
  const double kill = cm ? 0.0 : config.theta_minus;
  auto transform = [&](double m) {
    if (!cm) return std::exp(m);
    if (std::abs(1 - ustar) < 1e-12) return 1 + m;
    return 1 + std::expm1((1 - ustar) * m) / (1 - ustar);
  };
  const double tp = config.theta_plus;

  const std::size_t R = std::max<std::size_t>(opt.replicas, 2);
  const auto terms = parallel_map(R, [&](std::size_t r) {
    RandomSource rng(stream.child(r));
    const SupremumTrace tr = sample_running_supremum(motion, T, h, kill, rng);
    PathTerms p;
    double integral = 0;
    double prev = transform(tr.running_sup[0]);
    for (std::size_t k = 1; k <= steps; ++k) {
      const double cur = transform(tr.running_sup[k]);
      integral += 0.5 * h * (prev + cur);
      prev = cur;
    }
    p.total = prev + tp * integral;
    p.f_values.resize(nf);
    for (std::size_t j = 0; j < nf; ++j) p.f_values[j] = transform(tr.running_sup[f_index[j]]);
    return p;
  });

  auto mean_se = [&](auto get) {
    double mean = 0, sq = 0;
    for (const auto& p : terms) mean += get(p);
    mean /= static_cast<double>(R);
    for (const auto& p : terms) sq += (get(p) - mean) * (get(p) - mean);
    return std::pair{mean, std::sqrt(sq / static_cast<double>(R - 1) / static_cast<double>(R))};
  };
  ThetaRun run;
  std::tie(run.theta_T, run.std_error) = mean_se([](const PathTerms& p) { return p.total; });
  for (std::size_t j = 0; j < nf; ++j) {
    auto [m, se] = mean_se([j](const PathTerms& p) { return p.f_values[j]; });
    run.f_curve.push_back({static_cast<double>(f_index[j]) * h, m, se});
  }
  return run;
}

bool change_of_measure_available(const ParticleSystemConfig& config) {
  if (has_positive_jumps(config.model)) return false;
  try {
    esscher_tilt(config.model, psi_inverse(config.model, config.theta_minus));
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

ThetaTEstimate theta_T_estimate(const ParticleSystemConfig& config, double T, const ThetaTOptions& options) {
  validate(config);
  if (!(T > 0) || !std::isfinite(T)) throw DomainError("Theta(T) needs T > 0");
  ThetaTMethod method = options.method;
  if (method == ThetaTMethod::Auto)
    method = change_of_measure_available(config) ? ThetaTMethod::ChangeOfMeasure : ThetaTMethod::Direct;
  if (method == ThetaTMethod::ChangeOfMeasure && !change_of_measure_available(config))
    throw UnsupportedFamily("the change-of-measure estimator needs a motion without positive jumps whose tilt is "
                            "in the catalog");
  const ThetaRun fine = run_theta(config, T, options.fine_level, method, options, options.rng.child(0));
  const ThetaRun coarse = run_theta(config, T, options.coarse_level, method, options, options.rng.child(1));
  ThetaTEstimate est;
  est.T = T;
  est.theta_T = fine.theta_T;
  est.std_error = fine.std_error;
  est.method = method;
  est.f_curve = fine.f_curve;
  est.coarse_theta_T = coarse.theta_T;
  est.coarse_std_error = coarse.std_error;
  est.refinement_flag = std::abs(fine.theta_T - coarse.theta_T) >
                        std::hypot(fine.std_error, coarse.std_error);
  return est;
}

DirectThetaT theta_T_direct(const ParticleSystemConfig& config, double T, double step, double a,
                            std::size_t replicas, const RngStream& rng) {
  const TimeGrid grid = TimeGrid::uniform(0.0, T, step);
  const auto w = parallel_map(replicas, [&](std::size_t r) {
    const MaxStableField f = simulate_birth_kill(config, grid, a, rng.child(r));
    return std::exp(-*std::max_element(f.eta.begin(), f.eta.end()));
  });
  double mean = 0, sq = 0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(replicas);
  for (double v : w) sq += (v - mean) * (v - mean);
  const double se_mean = std::sqrt(sq / static_cast<double>(replicas - 1) / static_cast<double>(replicas));
  return {1 / mean, se_mean / (mean * mean)};
}

ExtremalSummary extremal_summary(const ParticleSystemConfig& config, std::span<const double> rho_times,
                                 std::span<const double> horizons, const ThetaTOptions& options) {
  ExtremalSummary s;
  for (double t : rho_times) s.rho_grid.push_back(extremal_correlation(config, t));
  if (!has_positive_jumps(config.model)) s.theta = extremal_index(config);
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    const ThetaTEstimate e = theta_T_estimate(config, horizons[i], options);
    s.theta_T.emplace_back(e.T, e.theta_T);
    if (i + 1 == horizons.size()) s.f_curve = e.f_curve;
  }
  return s;
}

}  // namespace lbr
