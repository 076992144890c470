#include "lbr/maxstable.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"

namespace lbr {

ParticleId make_particle_id(ParticleFamily family, std::uint64_t index) {
  return (static_cast<std::uint64_t>(family) << 62) | (index & ((std::uint64_t{1} << 62) - 1));
}
ParticleFamily family_of(ParticleId id) { return static_cast<ParticleFamily>(id >> 62); }
std::uint64_t index_of(ParticleId id) { return id & ((std::uint64_t{1} << 62) - 1); }

const char* construction_name(Construction c) {
  switch (c) {
    case Construction::TwoSided: return "two-sided";
    case Construction::BirthKill: return "birth-kill";
    case Construction::MMM: return "mmm";
  }
  return "?";
}

namespace {

// Substreams of a field stream.
enum : std::uint64_t {
  kStationaryPoints = 0,
  kStationaryPaths = 1,
  kBirthPoints = 2,
  kBirthPaths = 3,
  kKillPoints = 4,
  kKillPaths = 5,
  kSurvivorPoints = 6,
  kSurvivorPaths = 7,
};

class FieldBuilder {
 public:
  FieldBuilder(const TimeGrid& grid, double a, Construction c, const FieldOptions& options)
      : field_{grid, std::vector<double>(grid.size(), kNegInf), std::vector<ParticleId>(grid.size(), 0),
               std::nullopt, Truncation{a, options.bound}, c, 0},
        values_(grid.size()) {
    if (options.retain_particles) field_.particles.emplace();
  }

  // Scratch row for a particle's spectral path; entries outside the range
  // passed to merge() are ignored.
  std::span<double> row() { return values_; }

  void merge(ParticleId id, double position, std::size_t lo, std::size_t hi, double birth, double kill) {
    ++field_.particle_count;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = position + values_[i];
      if (v > field_.eta[i]) {
        field_.eta[i] = v;
        field_.argmax_id[i] = id;
      }
    }
    if (field_.particles) {
      SampledPath p{field_.grid, std::vector<double>(values_.size(), kNegInf), birth, kill};
      std::copy(values_.begin() + lo, values_.begin() + hi, p.values.begin() + lo);
      field_.particles->push_back({id, position, std::move(p)});
    }
  }

  MaxStableField finish() {
    const double a = field_.truncation.level;
    for (std::size_t i = 0; i < field_.eta.size(); ++i) {
      if (!(field_.eta[i] > -a)) {
        throw TruncationFailure("eta(" + format_real(field_.grid[i]) + ") = " + format_real(field_.eta[i]) +
                                " is not above the truncation level -" + format_real(a) +
                                "; increase the truncation level");
      }
    }
    return std::move(field_);
  }

 private:
  MaxStableField field_;
  std::vector<double> values_;
};

std::size_t first_at_or_after(std::span<const double> pts, double t) {
  return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), t) - pts.begin());
}

void add_stationary(FieldBuilder& b, const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                    const RngStream& rng) {
  const auto pts = grid.points();
  if (!grid.contains(0.0)) throw DomainError("the field constructions need t = 0 in the grid");
  const std::size_t zero = grid.index_of(0.0);
  std::vector<double> back_offsets(zero), back_values(zero);
  for (std::size_t k = 0; k < zero; ++k) back_offsets[k] = -pts[zero - 1 - k];
  const std::optional<LevyModel> dual =
      zero > 0 ? std::optional<LevyModel>(dual_motion(config.model)) : std::nullopt;

  RandomSource point_rng(rng.child(kStationaryPoints));
  const GumbelPPPSample points = sample_gumbel_ppp(a, point_rng);
  const RngStream paths = rng.child(kStationaryPaths);
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    const RngStream s = paths.child(i);
    RandomSource fwd(s.child(0));
    const double kill =
        evaluate_forward(config.model, pts.subspan(zero), config.theta_minus, fwd, b.row().subspan(zero));
    double birth = kNegInf;
    if (zero > 0) {
      RandomSource bwd(s.child(1));
      birth = -evaluate_forward(*dual, back_offsets, config.theta_plus, bwd, back_values);
      for (std::size_t k = 0; k < zero; ++k) b.row()[zero - 1 - k] = back_values[k];
    } else if (config.theta_plus > 0) {
      RandomSource bwd(s.child(1));
      birth = -bwd.exponential() / config.theta_plus;
    }
    b.merge(make_particle_id(ParticleFamily::Stationary, i), points.points[i], 0, pts.size(), birth, kill);
  }
}

}  // namespace

MaxStableField simulate_two_sided(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                                  const RngStream& rng, const FieldOptions& options) {
  validate(config);
  if (config.theta_plus != 0 || config.theta_minus != 0)
    throw PreconditionError("the two-sided construction needs theta_plus = theta_minus = 0; use birth-kill");
  FieldBuilder b(grid, a, Construction::TwoSided, options);
  add_stationary(b, config, grid, a, rng);
  return b.finish();
}

MaxStableField simulate_birth_kill(const ParticleSystemConfig& config, const TimeGrid& grid, double a,
                                   const RngStream& rng, const FieldOptions& options) {
  validate(config);
  FieldBuilder b(grid, a, Construction::BirthKill, options);
  add_stationary(b, config, grid, a, rng);
  const auto pts = grid.points();
  std::vector<double> offsets;

  if (config.theta_plus > 0 && grid.back() > 0) {
    RandomSource point_rng(rng.child(kBirthPoints));
    const auto births = sample_spacetime_ppp({0.0, grid.back()}, config.theta_plus, a, point_rng);
    const RngStream paths = rng.child(kBirthPaths);
    for (std::size_t i = 0; i < births.points.size(); ++i) {
      const auto [t0, u] = births.points[i];
      // birth window is (0, max grid]; a draw of exactly 0 has probability zero
      const std::size_t lo = first_at_or_after(pts, t0);
      offsets.assign(pts.begin() + static_cast<std::ptrdiff_t>(lo), pts.end());
      for (double& o : offsets) o -= t0;
      RandomSource prng(paths.child(i));
      const double life = evaluate_forward(config.model, offsets, config.theta_minus, prng,
                                           b.row().subspan(lo, offsets.size()));
      b.merge(make_particle_id(ParticleFamily::Born, i), u, lo, pts.size(), t0, t0 + life);
    }
  }
  if (config.theta_minus > 0 && grid.front() < 0) {
    const LevyModel dual = dual_motion(config.model);
    RandomSource point_rng(rng.child(kKillPoints));
    const auto kills = sample_spacetime_ppp({grid.front(), 0.0}, config.theta_minus, a, point_rng);
    const RngStream paths = rng.child(kKillPaths);
    std::vector<double> values;
    for (std::size_t i = 0; i < kills.points.size(); ++i) {
      const auto [t0, u] = kills.points[i];
      const std::size_t hi = first_at_or_after(pts, t0);
      offsets.resize(hi);
      values.resize(hi);
      for (std::size_t k = 0; k < hi; ++k) offsets[k] = t0 - pts[hi - 1 - k];
      RandomSource prng(paths.child(i));
      const double life = evaluate_forward(dual, offsets, config.theta_plus, prng, values);
      for (std::size_t k = 0; k < hi; ++k) b.row()[hi - 1 - k] = values[k];
      b.merge(make_particle_id(ParticleFamily::Killed, i), u, 0, hi, t0 - life, t0);
    }
  }
  return b.finish();
}

double default_lookback(const ParticleSystemConfig& config) {
  if (!(config.theta_plus > 0)) throw PreconditionError("the lookback needs theta_plus > 0");
  return 1.01 * std::log(1e6) / config.theta_plus;
}

MaxStableField simulate_mmm(const ParticleSystemConfig& config, const TimeGrid& grid, double lookback, double a,
                            const RngStream& rng, const FieldOptions& options) {
  validate(config);
  if (!(config.theta_minus > 0))
    throw PreconditionError("mixed moving maxima need theta_minus > 0");
  if (!(config.theta_plus > 0))
    throw PreconditionError(
        "mixed moving maxima need theta_plus > 0 (with theta_plus = 0 the lookback is unbounded; use birth-kill)");
  if (!(lookback > 0)) throw PreconditionError("lookback must be positive");
  FieldBuilder b(grid, a, Construction::MMM, options);
  const auto pts = grid.points();
  const double t_min = grid.front();
  const double tm = config.theta_minus;
  std::vector<double> offsets(pts.begin(), pts.end());
  for (double& o : offsets) o -= t_min;

  // Births in [t_min - lookback, t_min) that are still alive at t_min.
  {
    RandomSource point_rng(rng.child(kSurvivorPoints));
    const double q = -std::expm1(-tm * lookback);
    const std::uint64_t n = point_rng.poisson(config.theta_plus * std::exp(a) * q / tm);
    std::vector<double> positions(n);
    for (double& p : positions) p = -a + point_rng.exponential();
    const RngStream paths = rng.child(kSurvivorPaths);
    for (std::size_t i = 0; i < n; ++i) {
      RandomSource prng(paths.child(i));
      const double age = -std::log1p(-prng.uniform() * q) / tm;
      const double x0 = sample_increment(config.model, age, prng);
      const double life = evaluate_forward(config.model, offsets, tm, prng, b.row());
      for (double& v : b.row()) v += x0;
      b.merge(make_particle_id(ParticleFamily::Stationary, i), positions[i], 0, pts.size(), t_min - age,
              t_min + life);
    }
  }
  // Births inside the grid span.
  if (grid.back() > t_min) {
    RandomSource point_rng(rng.child(kBirthPoints));
    const auto births = sample_spacetime_ppp({t_min, grid.back()}, config.theta_plus, a, point_rng);
    const RngStream paths = rng.child(kBirthPaths);
    std::vector<double> off;
    for (std::size_t i = 0; i < births.points.size(); ++i) {
      const auto [t0, u] = births.points[i];
      const std::size_t lo = first_at_or_after(pts, t0);
      off.assign(pts.begin() + static_cast<std::ptrdiff_t>(lo), pts.end());
      for (double& o : off) o -= t0;
      RandomSource prng(paths.child(i));
      const double life = evaluate_forward(config.model, off, tm, prng, b.row().subspan(lo, off.size()));
      b.merge(make_particle_id(ParticleFamily::Born, i), u, lo, pts.size(), t0, t0 + life);
    }
  }
  return b.finish();
}

MaxStableField max_stability_transform(std::span<const MaxStableField> fields) {
  if (fields.empty()) throw DomainError("max_stability_transform needs at least one field");
  const MaxStableField& first = fields.front();
  MaxStableField out{first.grid, first.eta, first.argmax_id, std::nullopt, first.truncation, first.construction,
                     first.particle_count};
  double bound_sum = first.truncation.bound;
  for (std::size_t f = 1; f < fields.size(); ++f) {
    const MaxStableField& g = fields[f];
    if (!(g.grid == first.grid)) throw GridMismatch("max_stability_transform needs identical grids");
    for (std::size_t i = 0; i < out.eta.size(); ++i) {
      if (g.eta[i] > out.eta[i]) {
        out.eta[i] = g.eta[i];
        out.argmax_id[i] = g.argmax_id[i];
      }
    }
    out.truncation.level = std::min(out.truncation.level, g.truncation.level);
    bound_sum += g.truncation.bound;
    out.particle_count += g.particle_count;
  }
  out.truncation.bound = bound_sum;
  const double shift = std::log(static_cast<double>(fields.size()));
  for (double& v : out.eta) v -= shift;
  return out;
}

std::size_t contributing_count(const MaxStableField& field) {
  if (!field.particles) throw ParticlesNotRetained("contributing_count needs retained particles");
  return std::set<ParticleId>(field.argmax_id.begin(), field.argmax_id.end()).size();
}

}  // namespace lbr
