#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lbr/levy_model.hpp"
#include "lbr/paths.hpp"
#include "lbr/point_fields.hpp"
#include "lbr/rng.hpp"

namespace lbr {

// Family in the two top bits, index within the family below. Ties in the
// pointwise maximum go to the lowest identifier.
using ParticleId = std::uint64_t;
enum class ParticleFamily : std::uint64_t { Stationary = 0, Born = 1, Killed = 2 };
ParticleId make_particle_id(ParticleFamily family, std::uint64_t index);
ParticleFamily family_of(ParticleId id);
std::uint64_t index_of(ParticleId id);

struct Truncation {
  double level = 0;
  double bound = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated
};

struct RetainedParticle {
  ParticleId id;
  double position;  // initial (or birth, or terminal) position
  SampledPath path;  // spectral path; the particle's trajectory is position + path
};

struct MaxStableField {
  TimeGrid grid;
  std::vector<double> eta;
  std::vector<ParticleId> argmax_id;
  std::optional<std::vector<RetainedParticle>> particles;
  Truncation truncation;
  Construction construction = Construction::TwoSided;
  std::size_t particle_count = 0;
};

struct FieldOptions {
  bool retain_particles = false;
  double bound = std::numeric_limits<double>::quiet_NaN();  // recorded as is
};

// Plain field: Gumbel points above -a, each with an independent two-sided
// path. Requires theta_plus = theta_minus = 0 and t = 0 in the grid.
MaxStableField simulate_two_sided(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                                  const RngStream& rng, const FieldOptions& options = {});

// Particles present at time 0, born in (0, max grid] and killed in [min grid, 0).
MaxStableField simulate_birth_kill(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                                   const RngStream& rng, const FieldOptions& options = {});

// Mixed moving maxima: births at rate theta_plus on [min grid - lookback, max grid],
// each carrying a forward path killed at rate theta_minus. Births before the
// grid start are thinned exactly to those still alive at min grid.
MaxStableField simulate_mmm(const ParticleSystemConfig& config, const TimeGrid& grid, double lookback, double a,
                            const RngStream& rng, const FieldOptions& options = {});

// Lookback with exp(-theta_plus W) below 1e-6 (with 1% margin).
double default_lookback(const ParticleSystemConfig& config);

MaxStableField max_stability_transform(std::span<const MaxStableField> fields);

std::size_t contributing_count(const MaxStableField& field);

const char* construction_name(Construction c);

}  // namespace lbr
