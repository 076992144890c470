#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lbr/levy_model.hpp"
#include "lbr/rng.hpp"

namespace lbr {

// Strictly increasing, nonempty list of times. Copies share the point storage.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points, std::optional<double> step = std::nullopt);
  // t_min, t_min + step, ... up to t_max (inclusive within rounding). A point
  // within rounding distance of 0 is snapped to exactly 0.
  static TimeGrid uniform(double t_min, double t_max, double step);

  std::span<const double> points() const { return *points_; }
  double operator[](std::size_t i) const { return (*points_)[i]; }
  std::size_t size() const { return points_->size(); }
  double front() const { return points_->front(); }
  double back() const { return points_->back(); }
  std::optional<double> step() const { return step_; }
  bool contains(double t) const;
  // Index of the point equal to t; throws DomainError when absent.
  std::size_t index_of(double t) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.points_ == b.points_ || *a.points_ == *b.points_;
  }

 private:
  std::shared_ptr<const std::vector<double>> points_;
  std::optional<double> step_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One trajectory on a grid. values[i] is -inf exactly when the point lies
// before birth_time or at/after kill_time.
struct SampledPath {
  TimeGrid grid;
  std::vector<double> values;
  double birth_time = kNegInf;
  double kill_time = kInf;
};

// One exact draw of xi(t + dt) - xi(t).
double sample_increment(const LevyModel& model, double dt, RandomSource& rng);

// Motion started at 0 at time 0 and killed at rate kill_rate, evaluated at
// increasing offsets >= 0. Writes into out (same length) and returns the kill
// time. The kill time is drawn before any increment.
double evaluate_forward(const LevyModel& model, std::span<const double> offsets, double kill_rate,
                        RandomSource& rng, std::span<double> out);

SampledPath sample_forward(const LevyModel& model, const TimeGrid& grid, double kill_rate, const RngStream& rng);

// L(t) = L+(t) for t >= 0 and L-(-t) for t < 0, the halves drawn from
// substreams 0 and 1 of rng. birth_time is minus the backward kill time.
SampledPath sample_two_sided(const ParticleSystemConfig& config, const TimeGrid& grid, const RngStream& rng);

// Running supremum of the killed motion on [0, horizon] sampled every `step`.
// Brownian motions use the exact bridge maximum within each step, so the
// values are exact suprema over the continuous path; other families use the
// grid maximum.
struct SupremumTrace {
  double step = 0;
  std::vector<double> running_sup;  // running_sup[k] = sup over [0, k * step]
  double kill_time = kInf;
};
SupremumTrace sample_running_supremum(const LevyModel& model, double horizon, double step, double kill_rate,
                                      RandomSource& rng);

// Supremum over [0, horizon]; horizon may be infinite when kill_rate > 0.
double sample_supremum(const LevyModel& model, double horizon, double step, double kill_rate, RandomSource& rng);

}  // namespace lbr
