#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lbr/levy_model.hpp"
#include "lbr/paths.hpp"
#include "lbr/rng.hpp"

namespace lbr {

// Points of the PPP with intensity e^{-u} du restricted to (-a, inf).
struct GumbelPPPSample {
  std::vector<double> points;
  double truncation_level = 0;
};

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

struct SpaceTimePoint {
  double time;
  double position;
};

struct SpaceTimePPPSample {
  std::vector<SpaceTimePoint> points;
  Interval window{0, 0};
  double rate = 0;
  double truncation_level = 0;
};

GumbelPPPSample sample_gumbel_ppp(double a, RandomSource& rng);
SpaceTimePPPSample sample_spacetime_ppp(Interval window, double rate, double a, RandomSource& rng);

enum class Construction { TwoSided, BirthKill, MMM };

struct TruncationBoundOptions {
  Construction construction = Construction::BirthKill;
  std::size_t replicas = 4000;
  std::uint64_t seed = 0x7ACEu;
  double lookback = 0;  // MMM only; 0 selects the default lookback
  // When set, the field is only compared against this fixed level instead of
  // its running minimum over the grid (for events such as {eta(t) < 0}).
  std::optional<double> level;
};

// Monte-Carlo upper bound on the probability that some particle with initial
// position below -a would change eta on the grid. Engineering construction:
//
//   bound(a) = min_x [ P(min_grid eta < x) + e^{-x} sum_F w_F E(e^{S_F} 1{S_F > x + a}) ]
//
// with S_F the grid supremum of a path of family F, w_F the family's mass
// (1 for the stationary family, rate * window length for births and kills),
// P(min eta < x) <= |grid| exp(-e^{-x}) and the tail expectations replaced by
// the Chernoff bounds E(e^{g S}) e^{(1-g) c}, g in {1.5, 2, 3, 4}, estimated
// from a fixed-seed sample so the bound is monotone in a.
double truncation_error_bound(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                              const TruncationBoundOptions& options = {});

// Smallest a on a 0.5 step in [2, a_max] with bound below target; a_max when
// none qualifies.
double choose_truncation_level(const ParticleSystemConfig& config, const TimeGrid& grid, double target = 1e-4,
                               const TruncationBoundOptions& options = {}, double a_max = 40);

}  // namespace lbr
