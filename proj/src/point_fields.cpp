#include "lbr/point_fields.hpp"

#include <algorithm>
#include <cmath>

#include "lbr/errors.hpp"
#include "lbr/maxstable.hpp"

namespace lbr {

GumbelPPPSample sample_gumbel_ppp(double a, RandomSource& rng) {
  if (!std::isfinite(a)) throw DomainError("truncation level must be finite");
  GumbelPPPSample s{{}, a};
  const std::uint64_t n = rng.poisson(std::exp(a));
  s.points.resize(n);
  for (auto& p : s.points) p = -a + rng.exponential();
  return s;
}

SpaceTimePPPSample sample_spacetime_ppp(Interval window, double rate, double a, RandomSource& rng) {
  if (!(rate >= 0)) throw DomainError("rate must be >= 0");
  if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || window.hi < window.lo)
    throw DomainError("space-time window must be a bounded interval");
  SpaceTimePPPSample s{{}, window, rate, a};
  if (rate == 0 || window.length() == 0) return s;
  const std::uint64_t n = rng.poisson(rate * window.length() * std::exp(a));
  s.points.resize(n);
  for (auto& p : s.points) {
    p.time = window.lo + window.length() * rng.uniform();
    p.position = -a + rng.exponential();
  }
  return s;
}

namespace {

constexpr double kGammas[] = {1.0, 1.5, 2.0, 3.0, 4.0};

// Exponential moments of the grid supremum of one particle family.
struct FamilyTail {
  double weight = 0;
  double moments[std::size(kGammas)] = {};

  double tail(double c) const {
    double best = kInf;
    for (std::size_t g = 0; g < std::size(kGammas); ++g)
      best = std::min(best, std::exp((1 - kGammas[g]) * c) * moments[g]);
    return weight * best;
  }
};

FamilyTail make_tail(double weight, const std::vector<double>& sups) {
  FamilyTail f;
  f.weight = weight;
  for (std::size_t g = 0; g < std::size(kGammas); ++g) {
    double s = 0;
    for (double v : sups)
      if (v > kNegInf) s += std::exp(kGammas[g] * v);
    f.moments[g] = s / static_cast<double>(sups.size());
  }
  return f;
}

double grid_max(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  return m;
}

class BoundModel {
 public:
  BoundModel(const ParticleSystemConfig& config, const TimeGrid& grid, const TruncationBoundOptions& opt)
      : grid_size_(grid.size()), level_(opt.level) {
    validate(config);
    const RngStream base{opt.seed, 0xB0DDull};
    const std::size_t R = std::max<std::size_t>(opt.replicas, 10);
    const auto pts = grid.points();
    std::vector<double> sups(R), buffer(pts.size()), offsets;
    const double t_min = pts.front(), t_max = pts.back();

    if (opt.construction == Construction::MMM) {
      if (!(config.theta_plus > 0) || !(config.theta_minus > 0))
        throw PreconditionError("mixed moving maxima need theta_plus > 0 and theta_minus > 0");
      const double w = opt.lookback > 0 ? opt.lookback : default_lookback(config);
      for (std::size_t r = 0; r < R; ++r) {
        RandomSource rng(base.child(0).child(r));
        const double s = t_min - w + (t_max - t_min + w) * rng.uniform();
        sups[r] = sup_from(config.model, config.theta_minus, pts, s, rng, offsets, buffer);
      }
      tails_.push_back(make_tail(config.theta_plus * (t_max - t_min + w), sups));
      for (std::size_t r = 0; r < R; ++r) {
        RandomSource rng(base.child(1).child(r));
        sups[r] = sup_from(config.model, config.theta_minus, pts, t_min, rng, offsets, buffer);
      }
      // Particles born before the lookback window are never simulated.
      FamilyTail leak = make_tail(std::exp(-config.theta_plus * w), sups);
      leak_ = leak.weight * leak.moments[0];
      return;
    }

    for (std::size_t r = 0; r < R; ++r) {
      const SampledPath p = sample_two_sided(config, grid, base.child(2).child(r));
      sups[r] = grid_max(p.values);
    }
    tails_.push_back(make_tail(1.0, sups));
    if (opt.construction == Construction::TwoSided) return;

    if (config.theta_plus > 0 && t_max > 0) {
      for (std::size_t r = 0; r < R; ++r) {
        RandomSource rng(base.child(3).child(r));
        const double birth = t_max * rng.uniform();
        sups[r] = sup_from(config.model, config.theta_minus, pts, birth, rng, offsets, buffer);
      }
      tails_.push_back(make_tail(config.theta_plus * t_max, sups));
    }
    if (config.theta_minus > 0 && t_min < 0) {
      const LevyModel dual = dual_motion(config.model);
      for (std::size_t r = 0; r < R; ++r) {
        RandomSource rng(base.child(4).child(r));
        const double kill = t_min * rng.uniform();
        offsets.clear();
        for (std::size_t i = pts.size(); i-- > 0;)
          if (pts[i] < kill) offsets.push_back(kill - pts[i]);
        evaluate_forward(dual, offsets, config.theta_plus, rng, std::span(buffer).first(offsets.size()));
        sups[r] = grid_max(std::span<const double>(buffer).first(offsets.size()));
      }
      tails_.push_back(make_tail(config.theta_minus * (-t_min), sups));
    }
  }

  double bound(double a) const {
    auto tail_at = [&](double c) {
      double t = leak_;
      for (const auto& f : tails_) t += f.tail(c);
      return t;
    };
    if (level_) return std::min(1.0, std::exp(-*level_) * tail_at(*level_ + a));
    double best = 1.0;
    for (int k = -2000; k <= 2000; ++k) {
      const double x = 0.01 * k;
      const double low = std::min(1.0, static_cast<double>(grid_size_) * std::exp(-std::exp(-x)));
      best = std::min(best, low + std::exp(-x) * tail_at(x + a));
    }
    return best;
  }

 private:
  static double sup_from(const LevyModel& model, double kill_rate, std::span<const double> pts, double birth,
                         RandomSource& rng, std::vector<double>& offsets, std::vector<double>& buffer) {
    offsets.clear();
    for (double t : pts)
      if (t >= birth) offsets.push_back(t - birth);
    evaluate_forward(model, offsets, kill_rate, rng, std::span(buffer).first(offsets.size()));
    return grid_max(std::span<const double>(buffer).first(offsets.size()));
  }

  std::size_t grid_size_;
  std::optional<double> level_;
  std::vector<FamilyTail> tails_;
  double leak_ = 0;
};

}  // namespace

double truncation_error_bound(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                              const TruncationBoundOptions& options) {
  return BoundModel(config, grid, options).bound(a);
}

double choose_truncation_level(const ParticleSystemConfig& config, const TimeGrid& grid, double target,
                               const TruncationBoundOptions& options, double a_max) {
  const BoundModel model(config, grid, options);
  for (double a = 2.0; a < a_max; a += 0.5)
    if (model.bound(a) < target) return a;
  return a_max;
}

}  // namespace lbr
