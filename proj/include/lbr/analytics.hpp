#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbr/levy_model.hpp"
#include "lbr/maxstable.hpp"
#include "lbr/rng.hpp"

namespace lbr {

enum class RhoMethod { ClosedForm, Quadrature, MonteCarlo };
const char* rho_method_name(RhoMethod m);

struct RhoValue {
  double t = 0;
  double value = 0;
  RhoMethod method = RhoMethod::ClosedForm;
  double std_error = 0;  // zero for closed forms and series
};

struct RhoOptions {
  std::size_t replicas = 100000;  // Monte-Carlo route only
  RngStream rng{0x5EED, 0x2B0};
};

// rho(t) = e^{-theta_plus t} - e^{-theta_minus t} E (e^{xi(t)} - 1)^+.
// Closed form for Brownian and deterministic motions, a Poisson series for
// compound Poisson motions, Monte Carlo for stable motions.
RhoValue extremal_correlation(const ParticleSystemConfig& config, double t, const RhoOptions& options = {});
// Always the Monte-Carlo route, for cross-checks.
RhoValue extremal_correlation_mc(const ParticleSystemConfig& config, double t, const RhoOptions& options = {});

struct RhoEstimate {
  double value = 0;
  double std_error = 0;
  double p_hat = 0;
  std::size_t replicas = 0;
};
// 2 + log of the empirical P[eta(0) < 0, eta(t) < 0]; needs >= 1e4 replicas.
RhoEstimate extremal_correlation_estimator(std::span<const double> eta_at_0, std::span<const double> eta_at_t);
RhoEstimate extremal_correlation_estimator(std::span<const MaxStableField> fields, double t);

// Theta for motions without positive jumps.
double extremal_index(const ParticleSystemConfig& config);

enum class ThetaTMethod { Auto, ChangeOfMeasure, Direct };

struct ThetaTOptions {
  std::size_t replicas = 10000;
  RngStream rng{0x5EED, 0x7E7A};
  ThetaTMethod method = ThetaTMethod::Auto;
  int fine_level = 10;   // sup step T * 2^-fine_level
  int coarse_level = 8;  // comparison run
  std::size_t f_points = 65;  // points of the reported f curve
};

struct FPoint {
  double t;
  double f;
  double std_error;
};

struct ThetaTEstimate {
  double T = 0;
  double theta_T = 0;
  double std_error = 0;
  ThetaTMethod method = ThetaTMethod::Direct;
  std::vector<FPoint> f_curve;
  double coarse_theta_T = 0;
  double coarse_std_error = 0;
  // Set when the two refinements differ by more than one combined standard error.
  bool refinement_flag = false;
};

// Theta(T) = f(T) + theta_plus int_0^T f(s) ds, f(s) = E e^{M(s)}, M the running
// supremum of the killed forward motion. For motions without positive jumps
// whose tilt at u* = psi^{-1}(theta_minus) is in the catalog, f is estimated
// through f(s) = 1 + E~ phi(M~(s)), phi(x) = (e^{(1-u*)x} - 1)/(1-u*), with M~
// the supremum of the unkilled u*-tilted motion. Otherwise e^{M(s)} is averaged
// directly.
ThetaTEstimate theta_T_estimate(const ParticleSystemConfig& config, double T, const ThetaTOptions& options = {});

// Theta(T) read off the location of sup over a grid of eta: since
// P[sup eta <= x] = exp(-Theta(T) e^{-x}), E e^{-sup eta} = 1 / Theta(T).
struct DirectThetaT {
  double theta_T;
  double std_error;
};
DirectThetaT theta_T_direct(const ParticleSystemConfig& config, double T, double step, double a,
                            std::size_t replicas, const RngStream& rng);

struct ExtremalSummary {
  std::vector<RhoValue> rho_grid;
  std::optional<double> theta;
  std::vector<std::pair<double, double>> theta_T;
  std::vector<FPoint> f_curve;
};

ExtremalSummary extremal_summary(const ParticleSystemConfig& config, std::span<const double> rho_times,
                                 std::span<const double> horizons, const ThetaTOptions& options = {});

}  // namespace lbr
