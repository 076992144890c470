#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>

namespace lbr {

// Jump laws for compound Poisson motions.
struct ExponentialJumps {  // positive jumps, Exp with the given mean
  double mean;
  friend bool operator==(const ExponentialJumps&, const ExponentialJumps&) = default;
};
struct NegExponentialJumps {  // negative jumps, minus an Exp with the given mean
  double mean;
  friend bool operator==(const NegExponentialJumps&, const NegExponentialJumps&) = default;
};
// Jumps of +step with probability p_up, otherwise -step. Lattice valued.
struct TwoPointLatticeJumps {
  double step;
  double p_up;
  friend bool operator==(const TwoPointLatticeJumps&, const TwoPointLatticeJumps&) = default;
};
using JumpDist = std::variant<ExponentialJumps, NegExponentialJumps, TwoPointLatticeJumps>;

struct BrownianDrift {
  double sigma;
  double drift;  // lambda
  friend bool operator==(const BrownianDrift&, const BrownianDrift&) = default;
};
struct CompoundPoissonDrift {
  double rate;
  JumpDist jumps;
  double drift;
  friend bool operator==(const CompoundPoissonDrift&, const CompoundPoissonDrift&) = default;
};
// scale * xi_alpha(t) + drift * t, where xi_alpha(1) ~ S_alpha(1, -1, 0).
// scale and drift default to the plain stable motion; they exist so that the
// tilted limit motions theta * xi - psi(theta) t stay inside the catalog.
struct AlphaStableSkewed {
  double alpha;
  double scale = 1.0;
  double drift = 0.0;
  friend bool operator==(const AlphaStableSkewed&, const AlphaStableSkewed&) = default;
};
struct Deterministic {
  double drift;
  friend bool operator==(const Deterministic&, const Deterministic&) = default;
};

class LevyModel {
 public:
  using Family = std::variant<BrownianDrift, CompoundPoissonDrift, AlphaStableSkewed, Deterministic>;

  // Throws ValidationError when parameters are out of range.
  LevyModel(Family family);

  static LevyModel brownian(double sigma, double drift) { return {BrownianDrift{sigma, drift}}; }
  static LevyModel compound_poisson(double rate, JumpDist jumps, double drift) {
    return {CompoundPoissonDrift{rate, jumps, drift}};
  }
  static LevyModel stable(double alpha, double scale = 1.0, double drift = 0.0) {
    return {AlphaStableSkewed{alpha, scale, drift}};
  }
  static LevyModel deterministic(double drift) { return {Deterministic{drift}}; }

  const Family& family() const { return family_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&family_);
  }

  std::string describe() const;
  friend bool operator==(const LevyModel&, const LevyModel&) = default;

 private:
  Family family_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Supremum of u with psi(u) finite.
double u_infinity(const LevyModel& model);
bool has_positive_jumps(const LevyModel& model);
bool is_spectrally_negative(const LevyModel& model);
bool is_lattice(const LevyModel& model);
bool is_deterministic(const LevyModel& model);

// Constant of the stable exponent c_alpha u^alpha (c_1 = 2/pi for u log u).
double stable_constant(double alpha);

double laplace_exponent(const LevyModel& model, double u);

struct PsiDerivatives {
  double first;
  double second;
};
PsiDerivatives psi_derivatives(const LevyModel& model, double u);

// Largest solution u of psi(u) = y. Only for models without positive jumps.
double psi_inverse(const LevyModel& model, double y);

// Limits of psi' at 0+ and at u_infinity.
struct SlopeRange {
  double lower;
  double upper;
};
SlopeRange slope_range(const LevyModel& model);
// Limit of u psi'(u) - psi(u) as u tends to u_infinity.
double legendre_rate_limit(const LevyModel& model);

double legendre_I(const LevyModel& model, double beta);
double legendre_I_inverse(const LevyModel& model, double x);
// The u > 0 with I(psi'(u)) = x.
double legendre_tilt(const LevyModel& model, double x);

// Motion with exponent v -> psi(u + v) - psi(u).
LevyModel esscher_tilt(const LevyModel& model, double u);
// Motion of -xi.
LevyModel reflect(const LevyModel& model);
// Backward motion: reflect(esscher_tilt(model, 1)).
LevyModel dual_motion(const LevyModel& model);
// Motion of factor * xi(t) + extra_drift * t.
LevyModel scale_and_drift(const LevyModel& model, double factor, double extra_drift);

struct ParticleSystemConfig {
  LevyModel model;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  friend bool operator==(const ParticleSystemConfig&, const ParticleSystemConfig&) = default;
};

// Checks rates and the constraint psi(1) = theta_minus - theta_plus.
void validate(const ParticleSystemConfig& config);
// Fills in theta_plus from the rate constraint.
ParticleSystemConfig make_config(const LevyModel& model, double theta_minus);
// Configuration of the time-reversed field: dual motion, rates swapped.
ParticleSystemConfig esscher_dual(const ParticleSystemConfig& config);

// Plain "key = value" text with '#' comments.
std::string to_config_text(const ParticleSystemConfig& config);
ParticleSystemConfig parse_config_text(std::string_view text);
// Same content on one line, for file headers.
std::string config_summary(const ParticleSystemConfig& config);

ParticleSystemConfig preset(std::string_view name);

}  // namespace lbr
