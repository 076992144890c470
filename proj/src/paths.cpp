#include "lbr/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"

namespace lbr {

TimeGrid::TimeGrid(std::vector<double> points, std::optional<double> step) : step_(step) {
  if (points.empty()) throw DomainError("time grid must be nonempty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw DomainError("time grid points must be finite");
    if (i > 0 && !(points[i] > points[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
  if (step && !(*step > 0)) throw DomainError("grid step must be positive");
  points_ = std::make_shared<const std::vector<double>>(std::move(points));
}

TimeGrid TimeGrid::uniform(double t_min, double t_max, double step) {
  if (!(step > 0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
  if (!(t_max >= t_min)) throw DomainError("grid needs t_max >= t_min");
  const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
  std::vector<double> pts(count);
  for (std::size_t k = 0; k < count; ++k) {
    pts[k] = t_min + static_cast<double>(k) * step;
    if (std::abs(pts[k]) < 1e-9 * step) pts[k] = 0.0;
  }
  return TimeGrid(std::move(pts), step);
}

bool TimeGrid::contains(double t) const { return std::binary_search(points_->begin(), points_->end(), t); }

std::size_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(points_->begin(), points_->end(), t);
  if (it == points_->end() || *it != t) throw DomainError("time " + format_real(t) + " is not a grid point");
  return static_cast<std::size_t>(it - points_->begin());
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double jump_sum(const JumpDist& jumps, std::uint64_t count, RandomSource& rng) {
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& j) {
                          double s = 0;
                          for (std::uint64_t k = 0; k < count; ++k) s += rng.exponential();
                          return j.mean * s;
                        },
                        [&](const NegExponentialJumps& j) {
                          double s = 0;
                          for (std::uint64_t k = 0; k < count; ++k) s += rng.exponential();
                          return -j.mean * s;
                        },
                        [&](const TwoPointLatticeJumps& j) {
                          std::int64_t ups = 0;
                          if (j.p_up >= 1)
                            ups = static_cast<std::int64_t>(count);
                          else if (j.p_up > 0)
                            for (std::uint64_t k = 0; k < count; ++k) ups += rng.uniform() < j.p_up;
                          return j.step * static_cast<double>(2 * ups - static_cast<std::int64_t>(count));
                        },
                    },
                    jumps);
}

}  // namespace

double sample_increment(const LevyModel& model, double dt, RandomSource& rng) {
  if (dt == 0) return 0.0;
  return std::visit(Overloaded{
                        [&](const BrownianDrift& m) { return m.drift * dt + m.sigma * std::sqrt(dt) * rng.normal(); },
                        [&](const CompoundPoissonDrift& m) {
                          const std::uint64_t n = rng.poisson(m.rate * dt);
                          return jump_sum(m.jumps, n, rng) + m.drift * dt;
                        },
                        [&](const AlphaStableSkewed& m) {
                          const double s = std::pow(dt, 1 / m.alpha);
                          double x = s * rng.stable(m.alpha);
                          if (m.alpha == 1.0) x -= (2 / std::numbers::pi) * s * std::log(s);
                          return m.scale * x + m.drift * dt;
                        },
                        [&](const Deterministic& m) { return m.drift * dt; },
                    },
                    model.family());
}

double evaluate_forward(const LevyModel& model, std::span<const double> offsets, double kill_rate,
                        RandomSource& rng, std::span<double> out) {
  const double kill = kill_rate > 0 ? rng.exponential() / kill_rate : kInf;
  double t = 0, x = 0;
  std::size_t i = 0;
  if (const auto* det = model.as<Deterministic>()) {
    for (; i < offsets.size() && offsets[i] < kill; ++i) out[i] = det->drift * offsets[i];
  } else {
    for (; i < offsets.size() && offsets[i] < kill; ++i) {
      x += sample_increment(model, offsets[i] - t, rng);
      t = offsets[i];
      out[i] = x;
    }
  }
  for (; i < offsets.size(); ++i) out[i] = kNegInf;
  return kill;
}

SampledPath sample_forward(const LevyModel& model, const TimeGrid& grid, double kill_rate, const RngStream& stream) {
  if (grid.front() < 0) throw DomainError("sample_forward needs grid times >= 0");
  if (!(kill_rate >= 0)) throw DomainError("kill rate must be >= 0");
  SampledPath path{grid, std::vector<double>(grid.size()), 0.0, kInf};
  RandomSource rng(stream);
  path.kill_time = evaluate_forward(model, grid.points(), kill_rate, rng, path.values);
  return path;
}

SampledPath sample_two_sided(const ParticleSystemConfig& config, const TimeGrid& grid, const RngStream& stream) {
  const auto pts = grid.points();
  if (!grid.contains(0.0)) throw DomainError("sample_two_sided needs t = 0 in the grid");
  const std::size_t zero = grid.index_of(0.0);
  SampledPath path{grid, std::vector<double>(grid.size()), kNegInf, kInf};

  RandomSource fwd(stream.child(0));
  path.kill_time = evaluate_forward(config.model, pts.subspan(zero), config.theta_minus, fwd,
                                    std::span<double>(path.values).subspan(zero));
  if (zero > 0) {
    std::vector<double> offsets(zero), values(zero);
    for (std::size_t k = 0; k < zero; ++k) offsets[k] = -pts[zero - 1 - k];
    RandomSource bwd(stream.child(1));
    const double kill = evaluate_forward(dual_motion(config.model), offsets, config.theta_plus, bwd, values);
    path.birth_time = -kill;
    for (std::size_t k = 0; k < zero; ++k) path.values[zero - 1 - k] = values[k];
  } else if (config.theta_plus > 0) {
    RandomSource bwd(stream.child(1));
    path.birth_time = -bwd.exponential() / config.theta_plus;
  }
  return path;
}

namespace {

// Maximum of a Brownian bridge from x0 to x1 over a step with variance v.
double bridge_max(double x0, double x1, double v, RandomSource& rng) {
  const double d = x1 - x0;
  return 0.5 * (x0 + x1 + std::sqrt(d * d - 2 * v * std::log(rng.uniform())));
}

}  // namespace

SupremumTrace sample_running_supremum(const LevyModel& model, double horizon, double step, double kill_rate,
                                      RandomSource& rng) {
  if (!(step > 0) || !(horizon >= 0) || !std::isfinite(horizon))
    throw DomainError("running supremum needs a finite horizon and a positive step");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
  SupremumTrace trace{step, std::vector<double>(steps + 1, 0.0), kInf};
  trace.kill_time = kill_rate > 0 ? rng.exponential() / kill_rate : kInf;
  const auto* bm = model.as<BrownianDrift>();
  double x = 0, m = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * step;
    if (t0 < trace.kill_time) {
      const double dt = std::min(step, trace.kill_time - t0);
      const double next = x + sample_increment(model, dt, rng);
      const double top = bm ? bridge_max(x, next, bm->sigma * bm->sigma * dt, rng) : next;
      m = std::max(m, top);
      x = next;
    }
    trace.running_sup[k] = m;
  }
  return trace;
}

double sample_supremum(const LevyModel& model, double horizon, double step, double kill_rate, RandomSource& rng) {
  if (!(step > 0)) throw DomainError("supremum needs a positive step");
  if (std::isfinite(horizon)) return sample_running_supremum(model, horizon, step, kill_rate, rng).running_sup.back();
  if (!(kill_rate > 0)) throw DomainError("an infinite horizon needs a positive kill rate");
  const double kill = rng.exponential() / kill_rate;
  const auto* bm = model.as<BrownianDrift>();
  double t = 0, x = 0, m = 0;
  while (t < kill) {
    const double dt = std::min(step, kill - t);
    const double next = x + sample_increment(model, dt, rng);
    m = std::max(m, bm ? bridge_max(x, next, bm->sigma * bm->sigma * dt, rng) : next);
    x = next;
    t += dt;
  }
  return m;
}

}  // namespace lbr
