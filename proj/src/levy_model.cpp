#include "lbr/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"
#include "roots.hpp"

namespace lbr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

void check_family(const LevyModel::Family& family) {
  std::visit(Overloaded{
                 [](const BrownianDrift& m) {
                   if (!(m.sigma > 0 && finite(m.sigma)) || !finite(m.drift))
                     throw ValidationError("BrownianDrift needs sigma > 0 and a finite drift");
                 },
                 [](const CompoundPoissonDrift& m) {
                   if (!(m.rate > 0 && finite(m.rate)) || !finite(m.drift))
                     throw ValidationError("CompoundPoissonDrift needs rate > 0 and a finite drift");
                   std::visit(Overloaded{
                                  [](const ExponentialJumps& j) {
                                    if (!(j.mean > 0 && finite(j.mean)))
                                      throw ValidationError("jump mean must be > 0");
                                  },
                                  [](const NegExponentialJumps& j) {
                                    if (!(j.mean > 0 && finite(j.mean)))
                                      throw ValidationError("jump mean must be > 0");
                                  },
                                  [](const TwoPointLatticeJumps& j) {
                                    if (!(j.step > 0 && finite(j.step)) || !(j.p_up >= 0 && j.p_up <= 1))
                                      throw ValidationError("lattice jumps need step > 0 and p_up in [0, 1]");
                                  },
                              },
                              m.jumps);
                 },
                 [](const AlphaStableSkewed& m) {
                   if (!(m.alpha > 0 && m.alpha <= 2))
                     throw ValidationError("AlphaStableSkewed needs alpha in (0, 2]");
                   if (!(m.scale > 0 && finite(m.scale)) || !finite(m.drift))
                     throw ValidationError("AlphaStableSkewed needs scale > 0 and a finite drift");
                 },
                 [](const Deterministic& m) {
                   if (!finite(m.drift)) throw ValidationError("Deterministic needs a finite drift");
                 },
             },
             family);
}

// Jump moment generating function and its first two derivatives.
struct Mgf {
  double m0, m1, m2;
};

Mgf jump_mgf(const JumpDist& jumps, double u) {
  return std::visit(Overloaded{
                        [u](const ExponentialJumps& j) {
                          const double d = 1 - j.mean * u;
                          return Mgf{1 / d, j.mean / (d * d), 2 * j.mean * j.mean / (d * d * d)};
                        },
                        [u](const NegExponentialJumps& j) {
                          const double d = 1 + j.mean * u;
                          return Mgf{1 / d, -j.mean / (d * d), 2 * j.mean * j.mean / (d * d * d)};
                        },
                        [u](const TwoPointLatticeJumps& j) {
                          const double up = j.p_up * std::exp(j.step * u);
                          const double down = (1 - j.p_up) * std::exp(-j.step * u);
                          const double h = j.step;
                          return Mgf{up + down, h * (up - down), h * h * (up + down)};
                        },
                    },
                    jumps);
}

void check_u(const LevyModel& model, double u, bool open_at_zero) {
  const double top = u_infinity(model);
  const bool bad_low = open_at_zero ? !(u > 0) : !(u >= 0);
  if (bad_low || !(u < top)) {
    std::ostringstream os;
    os << "u = " << format_real(u) << " outside the domain " << (open_at_zero ? "(0, " : "[0, ")
       << format_real(top) << ") of psi for " << model.describe();
    throw DomainError(os.str());
  }
}

// psi, psi', psi'' without domain checks; u > 0 where derivatives are used.
struct PsiTriple {
  double v, d1, d2;
};

PsiTriple psi_all(const LevyModel& model, double u) {
  return std::visit(
      Overloaded{
          [u](const BrownianDrift& m) {
            const double s2 = m.sigma * m.sigma;
            return PsiTriple{m.drift * u + 0.5 * s2 * u * u, m.drift + s2 * u, s2};
          },
          [u](const CompoundPoissonDrift& m) {
            const Mgf g = jump_mgf(m.jumps, u);
            return PsiTriple{m.rate * (g.m0 - 1) + m.drift * u, m.rate * g.m1 + m.drift, m.rate * g.m2};
          },
          [u](const AlphaStableSkewed& m) {
            const double a = m.alpha;
            const double c = stable_constant(a);
            const double ku = m.scale * u;
            if (a == 1.0) {
              if (u == 0) return PsiTriple{0.0, -kInf, kInf};
              const double l = std::log(ku);
              return PsiTriple{c * ku * l + m.drift * u, c * m.scale * (l + 1) + m.drift, c * m.scale / u};
            }
            if (u == 0) return PsiTriple{0.0, a > 1 ? m.drift : -kInf, a == 2 ? 2 * c * m.scale * m.scale : kInf};
            const double p = c * std::pow(ku, a);
            return PsiTriple{p + m.drift * u, a * p / u + m.drift, a * (a - 1) * p / (u * u)};
          },
          [u](const Deterministic& m) { return PsiTriple{m.drift * u, m.drift, 0.0}; },
      },
      model.family());
}

double g_value(const LevyModel& model, double u) {
  const PsiTriple p = psi_all(model, u);
  return u * p.d1 - p.v;
}

}  // namespace

LevyModel::LevyModel(Family family) : family_(std::move(family)) { check_family(family_); }

std::string LevyModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const BrownianDrift& m) {
                   os << "BrownianDrift(sigma=" << format_real(m.sigma) << ", lambda=" << format_real(m.drift) << ")";
                 },
                 [&](const CompoundPoissonDrift& m) {
                   os << "CompoundPoissonDrift(rate=" << format_real(m.rate) << ", jumps=";
                   std::visit(Overloaded{
                                  [&](const ExponentialJumps& j) { os << "Exponential(mean=" << format_real(j.mean) << ")"; },
                                  [&](const NegExponentialJumps& j) {
                                    os << "NegExponential(mean=" << format_real(j.mean) << ")";
                                  },
                                  [&](const TwoPointLatticeJumps& j) {
                                    os << "TwoPointLattice(step=" << format_real(j.step)
                                       << ", p_up=" << format_real(j.p_up) << ")";
                                  },
                              },
                              m.jumps);
                   os << ", drift=" << format_real(m.drift) << ")";
                 },
                 [&](const AlphaStableSkewed& m) {
                   os << "AlphaStableSkewed(alpha=" << format_real(m.alpha) << ", scale=" << format_real(m.scale)
                      << ", drift=" << format_real(m.drift) << ")";
                 },
                 [&](const Deterministic& m) { os << "Deterministic(drift=" << format_real(m.drift) << ")"; },
             },
             family_);
  return os.str();
}

double u_infinity(const LevyModel& model) {
  if (const auto* cp = model.as<CompoundPoissonDrift>()) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->jumps)) return 1 / e->mean;
  }
  return kInf;
}

bool has_positive_jumps(const LevyModel& model) {
  if (const auto* cp = model.as<CompoundPoissonDrift>()) {
    if (std::holds_alternative<ExponentialJumps>(cp->jumps)) return true;
    if (const auto* l = std::get_if<TwoPointLatticeJumps>(&cp->jumps)) return l->p_up > 0;
  }
  return false;
}

bool is_spectrally_negative(const LevyModel& model) { return !has_positive_jumps(model); }

bool is_lattice(const LevyModel& model) {
  if (const auto* cp = model.as<CompoundPoissonDrift>())
    return std::holds_alternative<TwoPointLatticeJumps>(cp->jumps);
  return false;
}

bool is_deterministic(const LevyModel& model) { return model.as<Deterministic>() != nullptr; }

double stable_constant(double alpha) {
  if (alpha == 1.0) return 2 / std::numbers::pi;
  return -1 / std::cos(alpha * std::numbers::pi / 2);
}

double laplace_exponent(const LevyModel& model, double u) {
  check_u(model, u, false);
  return psi_all(model, u).v;
}

PsiDerivatives psi_derivatives(const LevyModel& model, double u) {
  check_u(model, u, true);
  const PsiTriple p = psi_all(model, u);
  return {p.d1, p.d2};
}

SlopeRange slope_range(const LevyModel& model) {
  return std::visit(
      Overloaded{
          [](const BrownianDrift& m) { return SlopeRange{m.drift, kInf}; },
          [](const CompoundPoissonDrift& m) {
            return std::visit(Overloaded{
                                  [&](const ExponentialJumps& j) { return SlopeRange{m.drift + m.rate * j.mean, kInf}; },
                                  [&](const NegExponentialJumps& j) {
                                    return SlopeRange{m.drift - m.rate * j.mean, m.drift};
                                  },
                                  [&](const TwoPointLatticeJumps& j) {
                                    return SlopeRange{m.drift + m.rate * j.step * (2 * j.p_up - 1),
                                                      j.p_up > 0 ? kInf : m.drift};
                                  },
                              },
                              m.jumps);
          },
          [](const AlphaStableSkewed& m) {
            if (m.alpha > 1) return SlopeRange{m.drift, kInf};
            if (m.alpha == 1) return SlopeRange{-kInf, kInf};
            return SlopeRange{-kInf, m.drift};
          },
          [](const Deterministic& m) { return SlopeRange{m.drift, m.drift}; },
      },
      model.family());
}

double legendre_rate_limit(const LevyModel& model) {
  if (is_deterministic(model)) return 0.0;
  if (const auto* cp = model.as<CompoundPoissonDrift>()) {
    if (std::holds_alternative<NegExponentialJumps>(cp->jumps)) return cp->rate;
    if (const auto* l = std::get_if<TwoPointLatticeJumps>(&cp->jumps))
      if (l->p_up == 0) return cp->rate;
  }
  return kInf;
}

namespace {

// Bracket [lo, hi] inside (0, u_infinity) with f(lo) < target < f(hi) for an
// increasing f, grown geometrically from `start`.
template <class F>
std::pair<double, double> bracket_increasing(F&& f, double target, const LevyModel& model, double start) {
  const double top = u_infinity(model);
  double lo = std::min(start, std::isfinite(top) ? top / 2 : start);
  double hi = lo;
  for (int i = 0; i < 2000 && !(f(lo) < target); ++i) lo /= 2;
  if (!(f(lo) < target)) throw DomainError("could not bracket root from below");
  hi = std::max(lo, start);
  for (int i = 0; i < 2000 && !(f(hi) > target); ++i) {
    if (std::isfinite(top))
      hi = hi + (top - hi) / 2;
    else
      hi *= 2;
  }
  if (!(f(hi) > target)) throw DomainError("could not bracket root from above");
  return {lo, hi};
}

}  // namespace

double psi_inverse(const LevyModel& model, double y) {
  if (has_positive_jumps(model))
    throw DomainError("psi_inverse requires a model without positive jumps: " + model.describe());
  if (!(y >= 0) || !std::isfinite(y)) throw DomainError("psi_inverse needs a finite y >= 0");
  const SlopeRange slopes = slope_range(model);
  if (is_deterministic(model)) {
    const double c = model.as<Deterministic>()->drift;
    if (c > 0) return y / c;
    if (y == 0) return 0.0;
    throw DomainError("psi never reaches a positive value for " + model.describe());
  }
  auto psi = [&](double u) { return psi_all(model, u).v; };
  auto psi_d = [&](double u) {
    const PsiTriple p = psi_all(model, u);
    return std::pair{p.v, p.d1};
  };
  double base = 0.0;  // a point on the increasing branch with psi(base) <= 0
  if (slopes.lower < 0) {
    if (!(slopes.upper > 0)) {
      if (y == 0) return 0.0;
      throw DomainError("psi never reaches a positive value for " + model.describe());
    }
    auto d1 = [&](double u) { return psi_all(model, u).d1; };
    auto [lo, hi] = bracket_increasing(d1, 0.0, model, 1.0);
    base = detail::solve_increasing(
        [&](double u) {
          const PsiTriple p = psi_all(model, u);
          return std::pair{p.d1, p.d2};
        },
        0.0, lo, hi);
  }
  if (y == 0 && base == 0.0) return 0.0;
  double hi = std::max(2 * base, 1.0);
  for (int i = 0; i < 2000 && !(psi(hi) > y); ++i) hi *= 2;
  if (!(psi(hi) > y)) throw DomainError("psi_inverse: no bracket found");
  return detail::solve_increasing(psi_d, y, base, hi);
}

double legendre_I(const LevyModel& model, double beta) {
  const SlopeRange r = slope_range(model);
  if (!(beta > r.lower && beta < r.upper)) {
    throw DomainError("beta = " + format_real(beta) + " outside (" + format_real(r.lower) + ", " +
                      format_real(r.upper) + ") for " + model.describe());
  }
  auto d1 = [&](double u) { return psi_all(model, u).d1; };
  auto [lo, hi] = bracket_increasing(d1, beta, model, 1.0);
  const double u = detail::solve_increasing(
      [&](double v) {
        const PsiTriple p = psi_all(model, v);
        return std::pair{p.d1, p.d2};
      },
      beta, lo, hi);
  return u * beta - psi_all(model, u).v;
}

double legendre_tilt(const LevyModel& model, double x) {
  const double top = legendre_rate_limit(model);
  if (!(x > 0 && x < top)) {
    throw DomainError("x = " + format_real(x) + " outside (0, " + format_real(top) + ") for " +
                      model.describe());
  }
  auto g = [&](double u) { return g_value(model, u); };
  auto [lo, hi] = bracket_increasing(g, x, model, 1.0);
  return detail::solve_increasing(
      [&](double u) {
        const PsiTriple p = psi_all(model, u);
        return std::pair{u * p.d1 - p.v, u * p.d2};
      },
      x, lo, hi);
}

double legendre_I_inverse(const LevyModel& model, double x) {
  return psi_all(model, legendre_tilt(model, x)).d1;
}

LevyModel esscher_tilt(const LevyModel& model, double u) {
  check_u(model, u, false);
  return std::visit(
      Overloaded{
          [u](const BrownianDrift& m) { return LevyModel::brownian(m.sigma, m.drift + m.sigma * m.sigma * u); },
          [u](const CompoundPoissonDrift& m) {
            return std::visit(
                Overloaded{
                    [&](const ExponentialJumps& j) {
                      const double d = 1 - j.mean * u;
                      return LevyModel::compound_poisson(m.rate / d, ExponentialJumps{j.mean / d}, m.drift);
                    },
                    [&](const NegExponentialJumps& j) {
                      const double d = 1 + j.mean * u;
                      return LevyModel::compound_poisson(m.rate / d, NegExponentialJumps{j.mean / d}, m.drift);
                    },
                    [&](const TwoPointLatticeJumps& j) {
                      const double up = m.rate * j.p_up * std::exp(j.step * u);
                      const double down = m.rate * (1 - j.p_up) * std::exp(-j.step * u);
                      return LevyModel::compound_poisson(up + down, TwoPointLatticeJumps{j.step, up / (up + down)},
                                                         m.drift);
                    },
                },
                m.jumps);
          },
          [u](const AlphaStableSkewed& m) {
            if (m.alpha != 2.0)
              throw UnsupportedFamily("exponential tilting of a stable law with alpha < 2 leaves the catalog");
            return LevyModel::stable(2.0, m.scale, m.drift + 2 * m.scale * m.scale * u);
          },
          [](const Deterministic& m) { return LevyModel::deterministic(m.drift); },
      },
      model.family());
}

LevyModel reflect(const LevyModel& model) {
  return std::visit(
      Overloaded{
          [](const BrownianDrift& m) { return LevyModel::brownian(m.sigma, -m.drift); },
          [](const CompoundPoissonDrift& m) {
            return std::visit(Overloaded{
                                  [&](const ExponentialJumps& j) {
                                    return LevyModel::compound_poisson(m.rate, NegExponentialJumps{j.mean}, -m.drift);
                                  },
                                  [&](const NegExponentialJumps& j) {
                                    return LevyModel::compound_poisson(m.rate, ExponentialJumps{j.mean}, -m.drift);
                                  },
                                  [&](const TwoPointLatticeJumps& j) {
                                    return LevyModel::compound_poisson(m.rate, TwoPointLatticeJumps{j.step, 1 - j.p_up},
                                                                       -m.drift);
                                  },
                              },
                              m.jumps);
          },
          [](const AlphaStableSkewed& m) {
            if (m.alpha != 2.0)
              throw UnsupportedFamily("the reflection of a totally skewed stable law with alpha < 2 leaves the catalog");
            return LevyModel::stable(2.0, m.scale, -m.drift);
          },
          [](const Deterministic& m) { return LevyModel::deterministic(-m.drift); },
      },
      model.family());
}

LevyModel dual_motion(const LevyModel& model) {
  if (const auto* cp = model.as<CompoundPoissonDrift>()) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->jumps); e && e->mean >= 1)
      throw UnsupportedFamily("exponential jumps with mean >= 1 have no tilted law at u = 1");
  }
  return reflect(esscher_tilt(model, 1.0));
}

LevyModel scale_and_drift(const LevyModel& model, double f, double extra) {
  if (!(f > 0) || !std::isfinite(f)) throw DomainError("scale factor must be positive");
  return std::visit(
      Overloaded{
          [&](const BrownianDrift& m) { return LevyModel::brownian(f * m.sigma, f * m.drift + extra); },
          [&](const CompoundPoissonDrift& m) {
            JumpDist jumps = std::visit(Overloaded{
                                            [&](const ExponentialJumps& j) -> JumpDist { return ExponentialJumps{f * j.mean}; },
                                            [&](const NegExponentialJumps& j) -> JumpDist {
                                              return NegExponentialJumps{f * j.mean};
                                            },
                                            [&](const TwoPointLatticeJumps& j) -> JumpDist {
                                              return TwoPointLatticeJumps{f * j.step, j.p_up};
                                            },
                                        },
                                        m.jumps);
            return LevyModel::compound_poisson(m.rate, jumps, f * m.drift + extra);
          },
          [&](const AlphaStableSkewed& m) { return LevyModel::stable(m.alpha, f * m.scale, f * m.drift + extra); },
          [&](const Deterministic& m) { return LevyModel::deterministic(f * m.drift + extra); },
      },
      model.family());
}

void validate(const ParticleSystemConfig& config) {
  if (!(config.theta_plus >= 0) || !(config.theta_minus >= 0) || !std::isfinite(config.theta_plus) ||
      !std::isfinite(config.theta_minus))
    throw ValidationError("rates theta_plus and theta_minus must be finite and >= 0");
  if (!(u_infinity(config.model) > 1))
    throw ValidationError("psi(1) is infinite for " + config.model.describe() +
                          " (exponential jumps need mean < 1)");
  const double psi1 = laplace_exponent(config.model, 1.0);
  const double want = config.theta_minus - config.theta_plus;
  const double scale = std::max({1.0, std::abs(psi1), config.theta_minus, config.theta_plus});
  if (std::abs(psi1 - want) > 1e-12 * scale) {
    throw ValidationError("rate constraint psi(1) = theta_minus - theta_plus violated: psi(1) = " +
                          format_real(psi1) + " but theta_minus - theta_plus = " + format_real(want));
  }
}

ParticleSystemConfig make_config(const LevyModel& model, double theta_minus) {
  if (!(u_infinity(model) > 1)) throw ValidationError("psi(1) is infinite for " + model.describe());
  ParticleSystemConfig c{model, theta_minus - laplace_exponent(model, 1.0), theta_minus};
  if (std::abs(c.theta_plus) < 1e-15) c.theta_plus = 0.0;
  validate(c);
  return c;
}

ParticleSystemConfig esscher_dual(const ParticleSystemConfig& config) {
  validate(config);
  return ParticleSystemConfig{dual_motion(config.model), config.theta_minus, config.theta_plus};
}

ParticleSystemConfig preset(std::string_view name) {
  if (name == "brown-resnick") return make_config(LevyModel::brownian(1.0, -0.5), 0.0);
  if (name == "poisson-jump") {
    const double e = std::numbers::e;
    return make_config(LevyModel::compound_poisson(1.0, TwoPointLatticeJumps{1.0, 1.0}, -(e - 1)), 0.0);
  }
  if (name == "bm-killed") return make_config(LevyModel::brownian(1.0, -0.5), 1.0);
  throw ValidationError("unknown preset '" + std::string(name) +
                        "' (known: brown-resnick, poisson-jump, bm-killed)");
}

}  // namespace lbr
