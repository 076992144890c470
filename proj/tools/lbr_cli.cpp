#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "lbr/errors.hpp"

using namespace lbr::cli;

namespace {

struct ModelFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr ModelFlag kModelFlags[] = {
    {"--family", "family", "brownian | compound_poisson | alpha_stable | deterministic"},
    {"--sigma", "sigma", "Brownian volatility"},
    {"--lambda", "lambda", "Brownian drift"},
    {"--rate", "rate", "compound Poisson jump rate"},
    {"--jumps", "jumps", "exponential | neg_exponential | lattice"},
    {"--jump-mean", "jump_mean", "mean jump size"},
    {"--jump-step", "jump_step", "lattice jump size"},
    {"--jump-p-up", "jump_p_up", "lattice up-jump probability"},
    {"--alpha-model", "alpha", "stable index of the motion"},
    {"--scale", "scale", "stable scale"},
    {"--drift", "drift", "drift (compound Poisson, stable, deterministic)"},
    {"--theta-plus", "theta_plus", "birth rate"},
    {"--theta-minus", "theta_minus", "killing rate"},
};

void add_common(CLI::App* app, CommonArgs& c, std::map<std::string, std::string>& raw, bool grid = true) {
  app->add_option("--preset", c.model.preset, "brown-resnick | poisson-jump | bm-killed");
  app->add_option("--config", c.model.config_path, "config file (key = value lines)");
  for (const auto& f : kModelFlags) app->add_option(f.flag, raw[f.key], f.help);
  if (grid) {
    app->add_option("--tmin", c.grid.t_min, "first grid time");
    app->add_option("--tmax", c.grid.t_max, "last grid time");
    app->add_option("--step", c.grid.step, "grid step")->check(CLI::PositiveNumber);
  }
  app->add_option("--seed", c.seed, "random seed");
  app->add_flag("--fresh-seed", c.fresh_seed, "draw the seed from the system entropy source and report it");
  app->add_option("--workers", c.workers, "worker threads (0 = hardware concurrency)");
  app->add_option("--out", c.out, "output file ('-' for stdout)");
  app->add_option("--report", c.report, "JSON report file ('-' for stdout)");
}

void collect(CommonArgs& c, const std::map<std::string, std::string>& raw) {
  for (const auto& [k, v] : raw)
    if (!v.empty()) c.model.overrides[k] = v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy-Brown-Resnick max-stable processes: simulation, analytics and limit experiments"};
  app.require_subcommand(1);

  SimulateArgs sim, mmm;
  RhoArgs rho;
  ThetaTArgs xi, tt;
  LimitArgs lim, ou;
  VerifyArgs ver;
  std::map<std::string, std::map<std::string, std::string>> raw;

  auto* s = app.add_subcommand("simulate", "simulate one or more max-stable fields on a grid");
  add_common(s, sim.common, raw["simulate"]);
  s->add_option("--construction", sim.construction, "auto | two-sided | birth-kill | mmm");
  s->add_option("--replicas", sim.common.replicas, "number of independent fields")->check(CLI::PositiveNumber);
  s->add_option("--a", sim.a, "truncation level (default: chosen from the error bound)");
  s->add_option("--a-cap", sim.a_cap, "largest automatically chosen truncation level");
  s->add_option("--target", sim.target, "truncation error target for the automatic level");
  s->add_option("--plot", sim.common.plot, "SVG plot of the first field");
  s->add_flag("--retain", sim.retain, "draw the particle paths in the plot");

  auto* m = app.add_subcommand("mmm", "simulate through the mixed moving maxima representation");
  add_common(m, mmm.common, raw["mmm"]);
  m->add_option("--replicas", mmm.common.replicas, "number of independent fields")->check(CLI::PositiveNumber);
  m->add_option("--a", mmm.a, "truncation level");
  m->add_option("--a-cap", mmm.a_cap, "largest automatically chosen truncation level");
  m->add_option("--target", mmm.target, "truncation error target for the automatic level");
  m->add_option("--lookback", mmm.lookback, "lookback window W (default from theta_plus)");
  m->add_option("--plot", mmm.common.plot, "SVG plot of the first field");
  m->add_flag("--retain", mmm.retain, "draw the particle paths in the plot");

  auto* r = app.add_subcommand("rho", "extremal correlation rho(t)");
  add_common(r, rho.common, raw["rho"], false);
  r->add_option("--t", rho.times, "lags (default 0, 0.5, ..., 4)")->delimiter(',');
  r->add_option("--replicas", rho.common.replicas, "Monte-Carlo replicas for stable motions");

  auto* e = app.add_subcommand("extremal-index", "extremal index Theta");
  add_common(e, xi.common, raw["extremal-index"], false);
  e->add_option("--T", xi.horizons, "also estimate Theta(T) at these horizons")->delimiter(',');
  e->add_option("--replicas", xi.common.replicas, "Monte-Carlo replicas for Theta(T)");

  auto* t = app.add_subcommand("theta-T", "Theta(T) by Monte Carlo");
  add_common(t, tt.common, raw["theta-T"], false);
  t->add_option("--T", tt.horizons, "horizons")->delimiter(',')->required();
  t->add_option("--replicas", tt.common.replicas, "Monte-Carlo replicas");

  auto* l = app.add_subcommand("limit", "normalized maxima of n independent Levy or stable paths");
  add_common(l, lim.common, raw["limit"]);
  l->add_option("--n", lim.n, "ensemble size")->check(CLI::PositiveNumber);
  l->add_option("--alpha", lim.alpha, "use the alpha-stable experiment with this index");
  l->add_option("--lambda-rate", lim.rate, "lambda = log n / s_n");
  l->add_option("--s-n", lim.s_n, "time shift s_n");
  l->add_option("--mode", lim.mode, "stable only: log-shift | window");
  l->add_flag("--generic", lim.generic, "stable only: centre with the generic b_n");
  l->add_option("--replicas", lim.common.replicas, "replicas")->check(CLI::PositiveNumber);

  auto* o = app.add_subcommand("ou", "normalized maxima of n stationary stable OU paths");
  add_common(o, ou.common, raw["ou"]);
  o->add_option("--n", ou.n, "ensemble size")->check(CLI::PositiveNumber);
  o->add_option("--alpha", ou.alpha, "stable index")->required();
  o->add_option("--replicas", ou.common.replicas, "replicas")->check(CLI::PositiveNumber);

  auto* v = app.add_subcommand("verify", "run a statistical verification suite");
  add_common(v, ver.common, raw["verify"], false);
  v->add_option("suite", ver.suite, "margins | stationarity | maxstability | mmm-equivalence | limits | analytics")
      ->required();
  ver.common.replicas = 10000;
  v->add_option("--replicas", ver.common.replicas, "replicas per test")->check(CLI::PositiveNumber);

  sim.common.out = "simulate.csv";
  sim.common.plot = "simulate.svg";
  mmm.common.out = "mmm.csv";
  mmm.common.plot = "mmm.svg";
  for (auto* c : {&rho.common, &xi.common, &tt.common, &ver.common}) c->out = "-";
  lim.common.out = "limit.csv";
  ou.common.out = "ou.csv";
  lim.common.replicas = ou.common.replicas = 1000;
  lim.common.grid = ou.common.grid = {0.0, 1.0, 0.5};
  xi.common.replicas = tt.common.replicas = 10000;
  rho.common.replicas = 100000;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 1;
  }

  try {
    if (s->parsed()) return collect(sim.common, raw["simulate"]), run_simulate(sim, false);
    if (m->parsed()) return collect(mmm.common, raw["mmm"]), run_simulate(mmm, true);
    if (r->parsed()) return collect(rho.common, raw["rho"]), run_rho(rho);
    if (e->parsed()) return collect(xi.common, raw["extremal-index"]), run_extremal_index(xi);
    if (t->parsed()) return collect(tt.common, raw["theta-T"]), run_theta_T(tt);
    if (l->parsed()) return collect(lim.common, raw["limit"]), run_limit(lim);
    if (o->parsed()) return collect(ou.common, raw["ou"]), run_ou(ou);
    if (v->parsed()) return collect(ver.common, raw["verify"]), run_verify(ver);
  } catch (const lbr::TruncationFailure& err) {
    std::cerr << "truncation failure: " << err.what() << "\n";
    return 2;
  } catch (const lbr::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
