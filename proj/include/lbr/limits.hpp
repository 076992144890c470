#pragma once

#include <cstdint>

#include "lbr/levy_model.hpp"
#include "lbr/paths.hpp"
#include "lbr/rng.hpp"

namespace lbr {

struct NormalizationPlan {
  double lambda = 0;  // log n / s_n
  double s_n = 0;
  double theta = 0;   // solves I(psi'(theta)) = lambda
  double b_n = 0;
  double n = 0;
  double lambda_n = 0;
};

// b_n = I^{-1}(lambda_n) s_n with
// lambda_n = (log n - log(theta sqrt(2 pi psi''(theta) s_n))) / s_n.
NormalizationPlan make_normalization(const LevyModel& model, double n, double s_n);
// s_n = log n / lambda.
NormalizationPlan make_normalization_for_rate(const LevyModel& model, double n, double lambda);

// Motion theta xi(t) - psi(theta) t of the limiting field.
LevyModel limit_motion(const LevyModel& model, double theta);
ParticleSystemConfig limit_config(const LevyModel& model, double theta);

struct AlphaNormalization {
  double alpha = 0;
  double n = 0;
  double theta_alpha = 0;
  double b_n_alpha = 0;
  // alpha = 1 only: tilde b_{n,1}(t) = b_{n,1} + tilde_slope * t with
  // tilde_slope = (2/pi) log n log log n.
  double tilde_slope = 0;
  double tilde_b(double t) const { return b_n_alpha + tilde_slope * t; }
  // alpha = 1 only. Rescaling by log n shifts xi_1 by (2/pi) log n log log n
  // (1 + t / log n), so the window experiment is centred by
  // b_{n,1} + tilde_slope + (2/pi) log log n * t and the OU experiment by
  // b_{n,1} + tilde_slope; tilde_b(t) agrees with the latter only at t = 1.
  double window_slope = 0;
  double window_centering(double t) const { return b_n_alpha + tilde_slope + window_slope * t; }
  double ou_centering() const { return b_n_alpha + tilde_slope; }
};
AlphaNormalization alpha_constants(double alpha, double n);

// max_{i<=n} xi_i(s_n + t) - b_n on the grid of offsets t.
SampledPath ensemble_max(const LevyModel& model, std::uint64_t n, const NormalizationPlan& plan, const TimeGrid& grid,
                         const RngStream& rng);
SampledPath ensemble_max(const LevyModel& model, std::uint64_t n, double s_n, const TimeGrid& grid,
                         const RngStream& rng);

enum class StableMode { LogShift, InfinitesimalWindow };
enum class StableCentering { AlphaSpecific, Generic };

// LogShift:            max xi_alpha(log n + t) - b
// InfinitesimalWindow: (log n)^{1/alpha} max xi_alpha(1 + t / log n) - b
// with b = b_{n,alpha} (window_centering(t) in the window mode for alpha = 1),
// or with the generic b_n of make_normalization at s_n = log n in its place
// when centering is Generic. Limit: (1/theta_alpha) eta_alpha(t)
// + (psi(theta_alpha)/theta_alpha) t in both modes.
SampledPath stable_ensemble_experiment(double alpha, std::uint64_t n, StableMode mode, const TimeGrid& grid,
                                       const RngStream& rng, StableCentering centering = StableCentering::AlphaSpecific);

// Z_alpha(t) = e^{-t/alpha} xi_alpha(e^t) (plus (2/pi) t when alpha = 1).
SampledPath ou_path(double alpha, const TimeGrid& grid, const RngStream& rng);

// (log n)^{1/alpha} max Z_{i,alpha}(t / log n) - b_{n,alpha}; for alpha = 1,
// log n max Z_{i,1}(t / log n) - ou_centering(). Limit: (1/theta_alpha) eta_alpha(t).
SampledPath ou_ensemble_experiment(double alpha, std::uint64_t n, const TimeGrid& grid, const RngStream& rng);

}  // namespace lbr
