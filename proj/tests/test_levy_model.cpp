#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lbr/errors.hpp"
#include "lbr/levy_model.hpp"

using namespace lbr;
using doctest::Approx;

namespace {

std::vector<LevyModel> catalog() {
  return {LevyModel::brownian(1.0, -0.5),
          LevyModel::brownian(0.7, 0.3),
          LevyModel::compound_poisson(2.0, ExponentialJumps{0.3}, -0.4),
          LevyModel::compound_poisson(1.5, NegExponentialJumps{0.8}, 0.2),
          LevyModel::compound_poisson(1.0, TwoPointLatticeJumps{0.5, 0.3}, 0.1),
          LevyModel::stable(2.0, 0.8, -0.2),
          LevyModel::deterministic(-0.7)};
}

// Finite differences of laplace_exponent as an oracle for the derivatives.
double d1_numeric(const LevyModel& m, double u) {
  const double h = 1e-5;
  return (laplace_exponent(m, u + h) - laplace_exponent(m, u - h)) / (2 * h);
}

}  // namespace

TEST_CASE("presets satisfy the rate constraint") {
  for (const char* name : {"brown-resnick", "poisson-jump", "bm-killed"}) {
    const auto c = preset(name);
    CHECK(laplace_exponent(c.model, 1.0) == Approx(c.theta_minus - c.theta_plus).epsilon(1e-12));
  }
  const auto br = preset("brown-resnick");
  CHECK(br.theta_plus == 0);
  CHECK(br.theta_minus == 0);
  const auto bk = preset("bm-killed");
  CHECK(bk.theta_minus == 1);
  CHECK(bk.theta_plus == Approx(1.0));
  CHECK_THROWS_AS(preset("nope"), ValidationError);
}

TEST_CASE("Brownian and alpha = 2 derivatives") {
  const auto b = LevyModel::brownian(1.0, -0.5);
  CHECK(laplace_exponent(b, 1.0) == Approx(0.0).epsilon(1e-15));
  const auto d = psi_derivatives(b, 1.0);
  CHECK(d.first == Approx(0.5));
  CHECK(d.second == Approx(1.0));
  const auto s = LevyModel::stable(2.0);
  const auto ds = psi_derivatives(s, 1.0);
  CHECK(ds.first == Approx(2.0));
  CHECK(ds.second == Approx(2.0));
}

TEST_CASE("psi_inverse examples and inverse identity") {
  const auto b = LevyModel::brownian(1.0, -0.5);
  CHECK(psi_inverse(b, 0.0) == Approx(1.0).epsilon(1e-12));
  CHECK(psi_inverse(b, 1.0) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(psi_inverse(LevyModel::compound_poisson(1.0, ExponentialJumps{0.5}, 0.0), 1.0), DomainError);
  for (const auto& m : catalog()) {
    if (has_positive_jumps(m) || is_deterministic(m)) continue;
    for (double u : {1.2, 2.0, 3.5, 6.0}) {
      const double y = laplace_exponent(m, u);
      if (y < 0) continue;
      CHECK(std::abs(psi_inverse(m, y) - u) < 1e-10 * std::max(1.0, u));
    }
  }
}

TEST_CASE("psi derivatives agree with finite differences") {
  for (const auto& m : catalog()) {
    for (double u : {0.3, 0.9, 1.1}) {
      if (!(u < u_infinity(m))) continue;
      CHECK(psi_derivatives(m, u).first == Approx(d1_numeric(m, u)).epsilon(1e-6));
    }
  }
}

TEST_CASE("Legendre transform examples and identity") {
  CHECK(legendre_I(LevyModel::stable(2.0), 1.0) == Approx(0.25));
  CHECK(legendre_I(LevyModel::brownian(1.0, 0.0), 1.0) == Approx(0.5));
  // I(psi'(u)) = u psi'(u) - psi(u)
  for (const auto& m : catalog()) {
    if (is_deterministic(m)) continue;
    for (double u : {0.4, 1.0, 1.7}) {
      if (!(u < u_infinity(m))) continue;
      const double d = psi_derivatives(m, u).first;
      const double want = u * d - laplace_exponent(m, u);
      CHECK(std::abs(legendre_I(m, d) - want) < 1e-10 * std::max(1.0, std::abs(want)));
      if (want > 0) {
        CHECK(std::abs(legendre_tilt(m, want) - u) < 1e-10 * std::max(1.0, u));
        CHECK(std::abs(legendre_I_inverse(m, want) - d) < 1e-9 * std::max(1.0, std::abs(d)));
      }
    }
  }
  CHECK_THROWS_AS(legendre_I(LevyModel::brownian(1, 0), -kInf), DomainError);
}

TEST_CASE("dual motion has exponent psi(1 - u) without killing") {
  for (const auto& raw : catalog()) {
    if (!(1 < u_infinity(raw))) continue;
    const double psi1 = laplace_exponent(raw, 1.0);
    // general form, then the balanced motion with psi(1) = 0
    const LevyModel d = dual_motion(raw);
    for (double u : {0.0, 0.25, 0.5, 0.9})
      CHECK(std::abs(laplace_exponent(d, u) - (laplace_exponent(raw, 1 - u) - psi1)) < 1e-10);
    const LevyModel m = scale_and_drift(raw, 1.0, -psi1);
    CHECK(std::abs(laplace_exponent(m, 1.0)) < 1e-12);
    const LevyModel dm = dual_motion(m);
    for (double u : {0.0, 0.25, 0.5, 0.9})
      CHECK(std::abs(laplace_exponent(dm, u) - laplace_exponent(m, 1 - u)) < 1e-10);
  }
}

TEST_CASE("Esscher tilt is a group action") {
  for (const auto& m : catalog()) {
    for (double u : {0.2, 0.5}) {
      if (!(2 * u < u_infinity(m))) continue;
      const LevyModel t = esscher_tilt(m, u);
      const LevyModel tt = esscher_tilt(t, u);
      const LevyModel direct = esscher_tilt(m, 2 * u);
      for (double v : {0.0, 0.3}) {
        CHECK(std::abs(laplace_exponent(t, v) - (laplace_exponent(m, u + v) - laplace_exponent(m, u))) < 1e-10);
        CHECK(std::abs(laplace_exponent(tt, v) - laplace_exponent(direct, v)) < 1e-10);
      }
    }
    // The dual of the dual is the original motion.
    if (const auto* cp = m.as<CompoundPoissonDrift>(); cp && std::holds_alternative<ExponentialJumps>(cp->jumps))
      continue;
    const LevyModel dd = dual_motion(dual_motion(m));
    for (double v : {0.1, 0.6}) CHECK(std::abs(laplace_exponent(dd, v) - laplace_exponent(m, v)) < 1e-10);
  }
  CHECK_THROWS_AS(esscher_tilt(LevyModel::stable(1.5), 1.0), UnsupportedFamily);
}

TEST_CASE("Esscher dual swaps the rates and keeps the constraint") {
  const auto c = preset("bm-killed");
  const auto d = esscher_dual(c);
  CHECK(d.theta_plus == c.theta_minus);
  CHECK(d.theta_minus == c.theta_plus);
  CHECK_NOTHROW(validate(d));
  const auto dd = esscher_dual(d);
  CHECK(laplace_exponent(dd.model, 0.7) == Approx(laplace_exponent(c.model, 0.7)).epsilon(1e-12));
}

TEST_CASE("model flags") {
  CHECK(has_positive_jumps(LevyModel::compound_poisson(1, ExponentialJumps{0.5}, 0)));
  CHECK(!has_positive_jumps(LevyModel::compound_poisson(1, NegExponentialJumps{0.5}, 0)));
  CHECK(has_positive_jumps(LevyModel::stable(1.5)) == false);
  CHECK(is_lattice(LevyModel::compound_poisson(1, TwoPointLatticeJumps{1, 0.5}, 0)));
  CHECK(!is_lattice(LevyModel::brownian(1, 0)));
  CHECK(u_infinity(LevyModel::compound_poisson(1, ExponentialJumps{0.25}, 0)) == Approx(4.0));
  CHECK(stable_constant(0.5) == Approx(-std::sqrt(2.0)));
  CHECK(stable_constant(1.0) == Approx(2 / std::numbers::pi));
  CHECK(stable_constant(2.0) == Approx(1.0));
}

TEST_CASE("validation rejects bad parameters and the rate constraint") {
  CHECK_THROWS_AS(LevyModel::brownian(-1, 0), ValidationError);
  CHECK_THROWS_AS(LevyModel::stable(2.5), ValidationError);
  CHECK_THROWS_AS(LevyModel::compound_poisson(1, TwoPointLatticeJumps{1, 1.5}, 0), ValidationError);
  try {
    validate(ParticleSystemConfig{LevyModel::brownian(1, 0), 0, 0});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("rate constraint") != std::string::npos);
  }
  CHECK_THROWS_AS(validate(ParticleSystemConfig{LevyModel::brownian(1, -0.5), -1, -1}), ValidationError);
  CHECK_THROWS_AS(make_config(LevyModel::compound_poisson(1, ExponentialJumps{1.0}, 0), 0), ValidationError);
  CHECK_THROWS_AS(laplace_exponent(LevyModel::brownian(1, 0), -1), DomainError);
}

TEST_CASE("config text round trip") {
  for (const char* name : {"brown-resnick", "poisson-jump", "bm-killed"}) {
    const auto c = preset(name);
    CHECK(parse_config_text(to_config_text(c)) == c);
  }
  const auto c = make_config(LevyModel::compound_poisson(1.3, NegExponentialJumps{0.4}, 0.1), 0.5);
  CHECK(parse_config_text(to_config_text(c)) == c);
  const auto s = make_config(LevyModel::stable(1.5, 0.5, -0.2), 2.0);
  CHECK(parse_config_text(to_config_text(s)) == s);
}

TEST_CASE("config parsing derives missing rates and rejects junk") {
  const auto c = parse_config_text("family = brownian\nsigma = 1\nlambda = -0.5\ntheta_minus = 1 # killed\n");
  CHECK(c.theta_plus == Approx(1.0));
  const auto d = parse_config_text("family = brownian\nsigma = 1\nlambda = 0\n");
  CHECK(d.theta_minus == Approx(0.5));
  CHECK(d.theta_plus == 0);
  CHECK_THROWS_AS(parse_config_text("family = brownian\nsigma = 1\ncolour = red\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("family = brownian\nsigma = one\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("sigma = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("family = brownian\nsigma = 1\nlambda = 0\ntheta_plus = 0\ntheta_minus = 0\n"),
                  ValidationError);
}

TEST_CASE("scale_and_drift matches the exponent of f xi(t) + c t") {
  for (const auto& m : catalog()) {
    const LevyModel s = scale_and_drift(m, 1.7, -0.3);
    for (double u : {0.1, 0.4}) {
      if (!(1.7 * u < u_infinity(m))) continue;
      CHECK(std::abs(laplace_exponent(s, u) - (laplace_exponent(m, 1.7 * u) - 0.3 * u)) < 1e-10);
    }
  }
  const LevyModel st = scale_and_drift(LevyModel::stable(1.0), 2.0, 0.5);
  CHECK(laplace_exponent(st, 0.8) == Approx(laplace_exponent(LevyModel::stable(1.0), 1.6) + 0.4).epsilon(1e-12));
}
