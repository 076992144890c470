#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lbr/analytics.hpp"
#include "lbr/errors.hpp"
#include "lbr/format.hpp"
#include "lbr/limits.hpp"
#include "lbr/maxstable.hpp"
#include "lbr/output.hpp"
#include "lbr/parallel.hpp"
#include "lbr/point_fields.hpp"
#include "lbr/stats.hpp"
#include "lbr/verify.hpp"

namespace lbr::cli {

namespace {

bool is_theta_key(const std::string& k) { return k == "theta_plus" || k == "theta_minus"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Output sink that is either stdout or a file.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw ValidationError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::uint64_t resolve_seed(CommonArgs& c) {
  if (c.fresh_seed) {
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed=" << c.seed << "\n";
  }
  if (c.workers) set_default_workers(c.workers);
  return c.seed;
}

TimeGrid make_grid(const GridArgs& g) { return TimeGrid::uniform(g.t_min, g.t_max, g.step); }

std::string grid_text(const TimeGrid& g) {
  return "grid=[" + format_real(g.front()) + "," + format_real(g.back()) + "] points=" + std::to_string(g.size());
}

Construction pick_construction(const std::string& name, const ParticleSystemConfig& config, bool mmm) {
  if (mmm || name == "mmm") return Construction::MMM;
  if (name == "two-sided") return Construction::TwoSided;
  if (name == "birth-kill") return Construction::BirthKill;
  if (name == "auto")
    return config.theta_plus == 0 && config.theta_minus == 0 ? Construction::TwoSided : Construction::BirthKill;
  throw ValidationError("unknown construction '" + name + "' (auto, two-sided, birth-kill, mmm)");
}

}  // namespace

ParticleSystemConfig ModelArgs::resolve(const std::string& default_preset) const {
  std::string base;
  if (!config_path.empty()) {
    if (!preset.empty()) throw ValidationError("--preset and --config are mutually exclusive");
    base = read_file(config_path);
  } else {
    base = to_config_text(lbr::preset(preset.empty() ? default_preset : preset));
  }
  bool model_changed = false, theta_given = false;
  for (const auto& [k, v] : overrides) (is_theta_key(k) ? theta_given : model_changed) = true;

  // With a changed motion and no explicit rates, the rates are re-derived
  // from the rate constraint instead of being carried over.
  std::string text;
  std::istringstream in(base);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    std::string key = eq == std::string::npos ? "" : line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (model_changed && !theta_given && is_theta_key(key)) continue;
    text += line + "\n";
  }
  for (const auto& [k, v] : overrides) text += k + " = " + v + "\n";
  return parse_config_text(text);
}

int run_simulate(SimulateArgs args, bool mmm) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const ParticleSystemConfig config = c.model.resolve();
  const TimeGrid grid = make_grid(c.grid);
  const Construction con = pick_construction(args.construction, config, mmm);

  // The field is stationary, so it is simulated on the grid shifted to put its
  // middle point at 0; this keeps both halves short and contains t = 0.
  TimeGrid sim_grid = grid;
  double centre = 0;
  if (con != Construction::MMM) {
    const auto pts = grid.points();
    centre = pts[pts.size() / 2];
    std::vector<double> shifted(pts.begin(), pts.end());
    for (double& t : shifted) t -= centre;
    sim_grid = TimeGrid(std::move(shifted), grid.step());
  }

  TruncationBoundOptions bopts;
  bopts.construction = con;
  const double lookback = con == Construction::MMM ? (args.lookback > 0 ? args.lookback : default_lookback(config)) : 0;
  bopts.lookback = lookback;
  const double a = args.a ? *args.a : choose_truncation_level(config, sim_grid, args.target, bopts, args.a_cap);
  const double bound = truncation_error_bound(config, sim_grid, a, bopts);
  if (!args.a && bound >= args.target)
    std::cerr << "warning: truncation level capped at a=" << format_real(a) << "; error bound "
              << format_real(bound) << " exceeds the target " << format_real(args.target)
              << " (raise --a-cap or pass --a)\n";

  const RngStream base{seed, 0};
  auto one = [&](std::size_t r, bool retain) {
    FieldOptions fo{retain, bound};
    const RngStream s = base.child(r);
    MaxStableField f = con == Construction::TwoSided   ? simulate_two_sided(config, sim_grid, a, s, fo)
                       : con == Construction::BirthKill ? simulate_birth_kill(config, sim_grid, a, s, fo)
                                                        : simulate_mmm(config, sim_grid, lookback, a, s, fo);
    f.grid = grid;
    return f;
  };
  const auto fields = parallel_map(c.replicas, [&](std::size_t r) { return one(r, false); });

  RunHeader header{mmm ? "mmm" : "simulate", config_summary(config), seed,
                   std::string("construction=") + construction_name(con) + " a=" + format_real(a) +
                       " bound=" + format_real(bound) + " " + grid_text(grid) +
                       (con == Construction::MMM ? " lookback=" + format_real(lookback) : "")};
  {
    Sink sink(c.out);
    auto& os = sink.stream();
    if (fields.size() == 1) {
      write_field_csv(os, header, fields.front());
    } else {
      os << "# " << header.line() << "\n" << "replica,t,eta,argmax_id\n";
      for (std::size_t r = 0; r < fields.size(); ++r)
        for (std::size_t i = 0; i < grid.size(); ++i)
          os << r << ',' << format_real(grid[i]) << ',' << format_real(fields[r].eta[i]) << ','
             << fields[r].argmax_id[i] << '\n';
    }
  }
  if (!c.plot.empty()) {
    std::ofstream svg(c.plot);
    if (!svg) throw ValidationError("cannot write '" + c.plot + "'");
    write_field_svg(svg, header, args.retain ? one(0, true) : fields.front());
  }
  return 0;
}

int run_rho(RhoArgs args) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const ParticleSystemConfig config = c.model.resolve();
  if (args.times.empty())
    for (int k = 0; k <= 8; ++k) args.times.push_back(0.5 * k);
  RhoOptions o;
  o.replicas = c.replicas;
  o.rng = RngStream{seed, 0x2B0};
  Sink sink(c.out);
  auto& os = sink.stream();
  os << "# " << RunHeader{"rho", config_summary(config), seed, ""}.line() << "\n";
  os << "t,rho,method,std_error\n";
  for (double t : args.times) {
    const RhoValue v = extremal_correlation(config, t, o);
    os << format_real(t) << ',' << format_real(v.value) << ',' << rho_method_name(v.method) << ','
       << format_real(v.std_error) << '\n';
  }
  return 0;
}

namespace {

nlohmann::json theta_T_json(const ParticleSystemConfig& config, const std::vector<double>& horizons,
                            std::size_t replicas, std::uint64_t seed) {
  nlohmann::json arr = nlohmann::json::array();
  for (double T : horizons) {
    ThetaTOptions o;
    o.replicas = replicas;
    o.rng = RngStream{seed, 0x7E7A};
    const ThetaTEstimate e = theta_T_estimate(config, T, o);
    arr.push_back({{"T", T},
                   {"theta_T", e.theta_T},
                   {"std_error", e.std_error},
                   {"theta_T_over_T", e.theta_T / T},
                   {"coarse_theta_T", e.coarse_theta_T},
                   {"coarse_std_error", e.coarse_std_error},
                   {"refinement_flag", e.refinement_flag},
                   {"method", e.method == ThetaTMethod::ChangeOfMeasure ? "change-of-measure" : "direct"}});
  }
  return arr;
}

}  // namespace

int run_extremal_index(ThetaTArgs args) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const ParticleSystemConfig config = c.model.resolve();
  nlohmann::json j{{"theta", extremal_index(config)}, {"config", config_summary(config)}};
  if (!args.horizons.empty()) {
    j["seed"] = seed;
    j["theta_T"] = theta_T_json(config, args.horizons, c.replicas, seed);
  }
  Sink sink(c.out);
  sink.stream() << j.dump() << "\n";
  return 0;
}

int run_theta_T(ThetaTArgs args) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const ParticleSystemConfig config = c.model.resolve();
  nlohmann::json j{{"config", config_summary(config)}, {"seed", seed}, {"replicas", c.replicas},
                   {"theta_T", theta_T_json(config, args.horizons, c.replicas, seed)}};
  Sink sink(c.out);
  sink.stream() << j.dump() << "\n";
  return 0;
}

namespace {

// Writes the replica CSV and a JSON report with the Gumbel KS of the first grid point.
int emit_limit(const CommonArgs& c, const std::string& command, const std::string& description,
               const TimeGrid& grid, const std::vector<SampledPath>& paths,
               const std::function<double(double, double)>& to_eta, nlohmann::json meta) {
  RunHeader header{command, description, c.seed, grid_text(grid) + " replicas=" + std::to_string(paths.size())};
  {
    Sink sink(c.out);
    write_replicas_csv(sink.stream(), header, paths);
  }
  std::vector<double> x(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) x[r] = to_eta(paths[r].values[0], grid[0]);
  meta["seed"] = c.seed;
  meta["description"] = description;
  nlohmann::json j;
  if (x.size() >= kMinKsSamples) {
    TestReport rep = ks_one_sample("Gumbel at t=" + format_real(grid[0]), x, standard_gumbel_cdf);
    for (auto it = meta.begin(); it != meta.end(); ++it) rep.metadata[it.key()] = it.value();
    j = to_json(rep);
  } else {
    j = {{"name", "Gumbel at t=" + format_real(grid[0])},
         {"skipped", "KS needs at least " + std::to_string(kMinKsSamples) + " replicas"},
         {"metadata", meta}};
  }
  Sink sink(c.report.empty() ? "-" : c.report);
  sink.stream() << j.dump() << "\n";
  return 0;
}

}  // namespace

int run_limit(LimitArgs args) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const TimeGrid grid = make_grid(c.grid);
  const RngStream base{seed, 0x11A};
  const double nd = static_cast<double>(args.n);

  if (args.alpha) {
    if (c.model.given()) throw ValidationError("--alpha selects the stable experiment; drop the model flags");
    const double alpha = *args.alpha;
    StableMode mode;
    if (args.mode == "log-shift")
      mode = StableMode::LogShift;
    else if (args.mode == "window")
      mode = StableMode::InfinitesimalWindow;
    else
      throw ValidationError("unknown mode '" + args.mode + "' (log-shift, window)");
    const auto centering = args.generic ? StableCentering::Generic : StableCentering::AlphaSpecific;
    const AlphaNormalization k = alpha_constants(alpha, nd);
    const double psi = laplace_exponent(LevyModel::stable(alpha), k.theta_alpha);
    const auto paths = parallel_map(c.replicas, [&](std::size_t r) {
      return stable_ensemble_experiment(alpha, args.n, mode, grid, base.child(r), centering);
    });
    const double theta = k.theta_alpha;
    return emit_limit(c, "limit",
                      "alpha_stable alpha=" + format_real(alpha) + " n=" + std::to_string(args.n) + " mode=" +
                          args.mode + (args.generic ? " centering=generic" : " centering=alpha"),
                      grid, paths, [=](double v, double t) { return theta * v - psi * t; },
                      {{"theta_alpha", theta}, {"b_n_alpha", k.b_n_alpha}, {"statistic_of", "theta*(M-b) - psi(theta)*t"}});
  }

  const ParticleSystemConfig config = c.model.resolve();
  const LevyModel& model = config.model;
  if (args.rate && args.s_n) throw ValidationError("give either --lambda-rate or --s-n");
  const NormalizationPlan plan = args.s_n ? make_normalization(model, nd, *args.s_n)
                                          : make_normalization_for_rate(model, nd, args.rate.value_or(0.5));
  const double psi = laplace_exponent(model, plan.theta);
  const auto paths =
      parallel_map(c.replicas, [&](std::size_t r) { return ensemble_max(model, args.n, plan, grid, base.child(r)); });
  const double theta = plan.theta;
  return emit_limit(c, "limit", model.describe() + " n=" + std::to_string(args.n), grid, paths,
                    [=](double v, double t) { return theta * v - psi * t; },
                    {{"theta", theta},
                     {"b_n", plan.b_n},
                     {"s_n", plan.s_n},
                     {"lambda", plan.lambda},
                     {"lambda_n", plan.lambda_n},
                     {"statistic_of", "theta*(M-b) - psi(theta)*t"}});
}

int run_ou(LimitArgs args) {
  CommonArgs& c = args.common;
  const std::uint64_t seed = resolve_seed(c);
  const TimeGrid grid = make_grid(c.grid);
  const RngStream base{seed, 0x0E};
  const double alpha = *args.alpha;
  const AlphaNormalization k = alpha_constants(alpha, static_cast<double>(args.n));
  const auto paths =
      parallel_map(c.replicas, [&](std::size_t r) { return ou_ensemble_experiment(alpha, args.n, grid, base.child(r)); });
  const double theta = k.theta_alpha;
  return emit_limit(c, "ou", "ou alpha=" + format_real(alpha) + " n=" + std::to_string(args.n), grid, paths,
                    [=](double v, double) { return theta * v; },
                    {{"theta_alpha", theta}, {"b_n_alpha", k.b_n_alpha}, {"statistic_of", "theta*(M-b)"}});
}

int run_verify(VerifyArgs args) {
  const auto suite = parse_suite(args.suite);
  if (!suite) {
    std::cerr << "error: unknown suite '" << args.suite
              << "' (margins, stationarity, maxstability, mmm-equivalence, limits, analytics)\n";
    return 1;
  }
  CommonArgs& c = args.common;
  VerifyOptions o;
  o.seed = resolve_seed(c);
  o.replicas = c.replicas;
  o.workers = c.workers;

  std::vector<ParticleSystemConfig> configs;
  if (c.model.given()) {
    configs.push_back(c.model.resolve());
  } else {
    std::vector<std::string> names;
    switch (*suite) {
      case Suite::Margins: names = {"brown-resnick", "poisson-jump", "bm-killed"}; break;
      case Suite::MaxStability:
      case Suite::Analytics: names = {"brown-resnick", "bm-killed"}; break;
      case Suite::Stationarity:
      case Suite::MmmEquivalence: names = {"bm-killed"}; break;
      case Suite::Limits: names = {"brown-resnick"}; break;
    }
    for (const auto& n : names) configs.push_back(preset(n));
  }

  Sink sink(c.out);
  auto& os = sink.stream();
  bool all = true;
  for (const auto& config : configs) {
    const SuiteReport rep = run_suite(*suite, config, o);
    for (const auto& r : rep.reports) os << to_json_line(r) << "\n";
    nlohmann::json summary{{"suite", rep.suite}, {"config", rep.config}, {"seed", o.seed},
                           {"tests", rep.reports.size()}, {"passed", rep.passed()}};
    if (rep.skipped) summary["skipped"] = *rep.skipped;
    os << summary.dump() << "\n";
    all = all && rep.passed();
  }
  return all ? 0 : 3;
}

}  // namespace lbr::cli
