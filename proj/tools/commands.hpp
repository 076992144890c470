#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbr/levy_model.hpp"

namespace lbr::cli {

// Model selection shared by all subcommands: a preset or config file,
// optionally overridden key by key (keys as in the config file format).
struct ModelArgs {
  std::string preset;
  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool given() const { return !preset.empty() || !config_path.empty() || !overrides.empty(); }
  ParticleSystemConfig resolve(const std::string& default_preset = "brown-resnick") const;
};

struct GridArgs {
  double t_min = 0;
  double t_max = 1;
  double step = 0.01;
};

struct CommonArgs {
  ModelArgs model;
  GridArgs grid;
  std::uint64_t seed = 1;
  bool fresh_seed = false;
  unsigned workers = 0;
  std::size_t replicas = 1;
  std::string out;   // "-" for stdout
  std::string plot;  // empty: no plot
  std::string report;  // JSON report path, "-" for stdout
};

struct SimulateArgs {
  CommonArgs common;
  std::string construction = "auto";  // auto, two-sided, birth-kill, mmm
  std::optional<double> a;
  double a_cap = 12;
  double target = 1e-4;
  double lookback = 0;
  bool retain = false;
};

struct RhoArgs {
  CommonArgs common;
  std::vector<double> times;
};

struct ThetaTArgs {
  CommonArgs common;
  std::vector<double> horizons;
};

struct LimitArgs {
  CommonArgs common;
  std::uint64_t n = 10000;
  std::optional<double> alpha;
  std::optional<double> rate;  // lambda = log n / s_n
  std::optional<double> s_n;
  std::string mode = "log-shift";  // stable: log-shift | window
  bool generic = false;
};

struct VerifyArgs {
  CommonArgs common;
  std::string suite;
};

// Each returns the process exit code; errors surface as lbr::Error.
int run_simulate(SimulateArgs args, bool mmm);
int run_rho(RhoArgs args);
int run_extremal_index(ThetaTArgs args);
int run_theta_T(ThetaTArgs args);
int run_limit(LimitArgs args);
int run_ou(LimitArgs args);
int run_verify(VerifyArgs args);

}  // namespace lbr::cli
