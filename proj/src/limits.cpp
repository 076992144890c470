#include "lbr/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"

namespace lbr {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha <= 2)) throw DomainError("alpha must lie in (0, 2]");
}

void check_n(double n) {
  if (!(n > 1) || !std::isfinite(n)) throw DomainError("ensemble size n must be > 1");
}

// Pointwise max over n independent copies of xi evaluated at `times`
// (increasing, >= 0). Member i uses rng.child(i).
std::vector<double> max_over_members(const LevyModel& model, std::uint64_t n, std::span<const double> times,
                                     const RngStream& rng) {
  if (n == 0) throw DomainError("ensemble needs n >= 1");
  if (times.front() < 0) throw DomainError("ensemble times must be >= 0");
  std::vector<double> best(times.size(), kNegInf), row(times.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomSource r(rng.child(i));
    evaluate_forward(model, times, 0.0, r, row);
    for (std::size_t k = 0; k < row.size(); ++k) best[k] = std::max(best[k], row[k]);
  }
  return best;
}

}  // namespace

NormalizationPlan make_normalization(const LevyModel& model, double n, double s_n) {
  if (is_lattice(model)) throw LatticeModel("the limit theorem does not hold for lattice models");
  check_n(n);
  if (!(s_n > 0)) throw DomainError("s_n must be positive");
  NormalizationPlan p;
  p.n = n;
  p.s_n = s_n;
  p.lambda = std::log(n) / s_n;
  const double top = legendre_rate_limit(model);
  if (!(p.lambda < top))
    throw DomainError("lambda = " + format_real(p.lambda) + " outside (0, " + format_real(top) + ")");
  p.theta = legendre_tilt(model, p.lambda);
  const double d2 = psi_derivatives(model, p.theta).second;
  p.lambda_n = (std::log(n) - std::log(p.theta * std::sqrt(2 * kPi * d2 * s_n))) / s_n;
  p.b_n = legendre_I_inverse(model, p.lambda_n) * s_n;
  return p;
}

NormalizationPlan make_normalization_for_rate(const LevyModel& model, double n, double lambda) {
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  check_n(n);
  return make_normalization(model, n, std::log(n) / lambda);
}

LevyModel limit_motion(const LevyModel& model, double theta) {
  return scale_and_drift(model, theta, -laplace_exponent(model, theta));
}

ParticleSystemConfig limit_config(const LevyModel& model, double theta) {
  ParticleSystemConfig c{limit_motion(model, theta), 0.0, 0.0};
  validate(c);
  return c;
}

AlphaNormalization alpha_constants(double alpha, double n) {
  check_alpha(alpha);
  check_n(n);
  AlphaNormalization a;
  a.alpha = alpha;
  a.n = n;
  const double L = std::log(n);
  if (alpha == 1.0) {
    a.theta_alpha = kPi / 2;
    a.b_n_alpha = (2 / kPi) * std::log(kPi * std::numbers::e / 2) * L - std::log(2 * kPi * L) / kPi;
    a.tilde_slope = (2 / kPi) * L * std::log(L);
    a.window_slope = (2 / kPi) * std::log(L);
  } else {
    a.theta_alpha = std::pow((alpha - 1) * stable_constant(alpha), -1 / alpha);
    a.b_n_alpha = (alpha / (alpha - 1) * L - 0.5 * std::log(2 * kPi * alpha * L)) / a.theta_alpha;
  }
  return a;
}

SampledPath ensemble_max(const LevyModel& model, std::uint64_t n, const NormalizationPlan& plan,
                         const TimeGrid& grid, const RngStream& rng) {
  std::vector<double> times(grid.points().begin(), grid.points().end());
  for (double& t : times) t += plan.s_n;
  SampledPath out{grid, max_over_members(model, n, times, rng), kNegInf, kInf};
  for (double& v : out.values) v -= plan.b_n;
  return out;
}

SampledPath ensemble_max(const LevyModel& model, std::uint64_t n, double s_n, const TimeGrid& grid,
                         const RngStream& rng) {
  return ensemble_max(model, n, make_normalization(model, static_cast<double>(n), s_n), grid, rng);
}

SampledPath stable_ensemble_experiment(double alpha, std::uint64_t n, StableMode mode, const TimeGrid& grid,
                                       const RngStream& rng, StableCentering centering) {
  check_alpha(alpha);
  const double nd = static_cast<double>(n);
  const AlphaNormalization c = alpha_constants(alpha, nd);
  const LevyModel model = LevyModel::stable(alpha);
  const double L = std::log(nd);
  const double b = centering == StableCentering::AlphaSpecific ? c.b_n_alpha
                                                               : make_normalization(model, nd, L).b_n;
  const auto pts = grid.points();
  std::vector<double> times(pts.begin(), pts.end());
  SampledPath out{grid, {}, kNegInf, kInf};

  if (mode == StableMode::LogShift) {
    for (double& t : times) t += L;
    out.values = max_over_members(model, n, times, rng);
    for (double& v : out.values) v -= b;
    return out;
  }
  for (double& t : times) t = 1 + t / L;
  out.values = max_over_members(model, n, times, rng);
  const double scale = std::pow(L, 1 / alpha);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double shift = alpha == 1.0 ? c.tilde_slope + c.window_slope * pts[k] : 0.0;
    out.values[k] = scale * out.values[k] - b - shift;
  }
  return out;
}

namespace {

// Z_alpha at the grid times scaled by `time_scale`.
std::vector<double> ou_values(double alpha, std::span<const double> pts, double time_scale, RandomSource& rng,
                              const LevyModel& model, std::vector<double>& times) {
  times.resize(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) times[k] = std::exp(pts[k] * time_scale);
  std::vector<double> z(pts.size());
  evaluate_forward(model, times, 0.0, rng, z);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double s = pts[k] * time_scale;
    z[k] *= std::exp(-s / alpha);
    if (alpha == 1.0) z[k] += (2 / kPi) * s;
  }
  return z;
}

}  // namespace

SampledPath ou_path(double alpha, const TimeGrid& grid, const RngStream& rng) {
  check_alpha(alpha);
  const LevyModel model = LevyModel::stable(alpha);
  RandomSource r(rng);
  std::vector<double> times;
  return SampledPath{grid, ou_values(alpha, grid.points(), 1.0, r, model, times), kNegInf, kInf};
}

SampledPath ou_ensemble_experiment(double alpha, std::uint64_t n, const TimeGrid& grid, const RngStream& rng) {
  check_alpha(alpha);
  if (n == 0) throw DomainError("ensemble needs n >= 1");
  const double nd = static_cast<double>(n);
  const AlphaNormalization c = alpha_constants(alpha, nd);
  const LevyModel model = LevyModel::stable(alpha);
  const double L = std::log(nd);
  const auto pts = grid.points();
  std::vector<double> best(pts.size(), kNegInf), times;
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomSource r(rng.child(i));
    const std::vector<double> z = ou_values(alpha, pts, 1 / L, r, model, times);
    for (std::size_t k = 0; k < pts.size(); ++k) best[k] = std::max(best[k], z[k]);
  }
  const double scale = std::pow(L, 1 / alpha);
  const double b = alpha == 1.0 ? c.ou_centering() : c.b_n_alpha;
  for (double& v : best) v = scale * v - b;
  return SampledPath{grid, std::move(best), kNegInf, kInf};
}

}  // namespace lbr
