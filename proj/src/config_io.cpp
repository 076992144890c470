#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "lbr/errors.hpp"
#include "lbr/format.hpp"
#include "lbr/levy_model.hpp"

namespace lbr {

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

Entries entries_of(const ParticleSystemConfig& c) {
  Entries out;
  auto put = [&](const char* k, double v) { out.emplace_back(k, format_real(v)); };
  const LevyModel& m = c.model;
  if (const auto* b = m.as<BrownianDrift>()) {
    out.emplace_back("family", "brownian");
    put("sigma", b->sigma);
    put("lambda", b->drift);
  } else if (const auto* cp = m.as<CompoundPoissonDrift>()) {
    out.emplace_back("family", "compound_poisson");
    put("rate", cp->rate);
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->jumps)) {
      out.emplace_back("jumps", "exponential");
      put("jump_mean", e->mean);
    } else if (const auto* n = std::get_if<NegExponentialJumps>(&cp->jumps)) {
      out.emplace_back("jumps", "neg_exponential");
      put("jump_mean", n->mean);
    } else {
      const auto& l = std::get<TwoPointLatticeJumps>(cp->jumps);
      out.emplace_back("jumps", "lattice");
      put("jump_step", l.step);
      put("jump_p_up", l.p_up);
    }
    put("drift", cp->drift);
  } else if (const auto* s = m.as<AlphaStableSkewed>()) {
    out.emplace_back("family", "alpha_stable");
    put("alpha", s->alpha);
    put("scale", s->scale);
    put("drift", s->drift);
  } else {
    out.emplace_back("family", "deterministic");
    put("drift", m.as<Deterministic>()->drift);
  }
  put("theta_plus", c.theta_plus);
  put("theta_minus", c.theta_minus);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& key, const std::string& text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("config key '" + key + "': '" + text + "' is not a number");
  return v;
}

}  // namespace

std::string to_config_text(const ParticleSystemConfig& config) {
  std::string out;
  for (const auto& [k, v] : entries_of(config)) out += k + " = " + v + "\n";
  return out;
}

std::string config_summary(const ParticleSystemConfig& config) {
  std::string out;
  for (const auto& [k, v] : entries_of(config)) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v;
  }
  return out;
}

ParticleSystemConfig parse_config_text(std::string_view text) {
  static const std::vector<std::string> known = {"family",    "sigma",     "lambda", "rate",  "jumps",
                                                 "jump_mean", "jump_step", "jump_p_up", "alpha", "scale",
                                                 "drift",     "theta_plus", "theta_minus"};
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  auto number = [&](const char* key) -> std::optional<double> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return parse_number(key, it->second);
  };
  auto required = [&](const char* key) {
    auto v = number(key);
    if (!v) throw ValidationError(std::string("config is missing key '") + key + "'");
    return *v;
  };
  const auto fam = kv.find("family");
  if (fam == kv.end()) throw ValidationError("config is missing key 'family'");
  const std::string& family = fam->second;

  std::optional<LevyModel> model;
  if (family == "brownian") {
    model = LevyModel::brownian(required("sigma"), number("lambda").value_or(0.0));
  } else if (family == "compound_poisson") {
    const std::string jumps = kv.count("jumps") ? kv["jumps"] : "exponential";
    JumpDist j = ExponentialJumps{1.0};
    if (jumps == "exponential")
      j = ExponentialJumps{required("jump_mean")};
    else if (jumps == "neg_exponential")
      j = NegExponentialJumps{required("jump_mean")};
    else if (jumps == "lattice")
      j = TwoPointLatticeJumps{required("jump_step"), number("jump_p_up").value_or(0.5)};
    else
      throw ValidationError("unknown jump law '" + jumps + "' (exponential, neg_exponential, lattice)");
    model = LevyModel::compound_poisson(required("rate"), j, number("drift").value_or(0.0));
  } else if (family == "alpha_stable") {
    model = LevyModel::stable(required("alpha"), number("scale").value_or(1.0), number("drift").value_or(0.0));
  } else if (family == "deterministic") {
    model = LevyModel::deterministic(number("drift").value_or(0.0));
  } else {
    throw ValidationError("unknown family '" + family +
                          "' (brownian, compound_poisson, alpha_stable, deterministic)");
  }

  const auto tp = number("theta_plus");
  const auto tm = number("theta_minus");
  if (!(u_infinity(*model) > 1)) throw ValidationError("psi(1) is infinite for " + model->describe());
  const double psi1 = laplace_exponent(*model, 1.0);
  ParticleSystemConfig c{*model, 0.0, 0.0};
  if (tp && tm) {
    c.theta_plus = *tp;
    c.theta_minus = *tm;
  } else if (tm) {
    c.theta_minus = *tm;
    c.theta_plus = *tm - psi1;
  } else if (tp) {
    c.theta_plus = *tp;
    c.theta_minus = *tp + psi1;
  } else {
    c.theta_plus = std::max(0.0, -psi1);
    c.theta_minus = std::max(0.0, psi1);
  }
  if (std::abs(c.theta_plus) < 1e-15) c.theta_plus = 0.0;
  if (std::abs(c.theta_minus) < 1e-15) c.theta_minus = 0.0;
  validate(c);
  return c;
}

}  // namespace lbr
