#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& out_file = "") {
  std::string cmd = std::string(LBR_CLI_PATH) + " " + args;
  cmd += out_file.empty() ? " > /dev/null 2>&1" : " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("lbr_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate writes CSV and SVG") {
  TempDir d;
  const auto csv = d.path / "f.csv", svg = d.path / "f.svg";
  CHECK(run("simulate --preset brown-resnick --tmax 10 --step 0.01 --seed 7 --out " + csv.string() + " --plot " +
            svg.string()) == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("# simulate seed=7", 0) == 0);
  CHECK(text.find("t,eta,argmax_id\n0,") != std::string::npos);
  CHECK(slurp(svg).find("<svg") == 0);
}

TEST_CASE("extremal-index prints theta") {
  TempDir d;
  const auto out = d.path / "x.json";
  CHECK(run("extremal-index --preset brown-resnick", out.string()) == 0);
  CHECK(slurp(out).find("\"theta\":0.5") != std::string::npos);
}

TEST_CASE("rate constraint violations exit with 1") {
  TempDir d;
  const auto cfg = d.path / "bad.cfg";
  std::ofstream(cfg) << "family = brownian\nsigma = 1\nlambda = 0\ntheta_plus = 0\ntheta_minus = 0\n";
  const auto out = d.path / "err.txt";
  CHECK(run("simulate --config " + cfg.string() + " --out " + (d.path / "o.csv").string(), out.string()) == 1);
  CHECK(slurp(out).find("rate constraint") != std::string::npos);
}

TEST_CASE("truncation failure exits with 2") {
  TempDir d;
  CHECK(run("simulate --preset brown-resnick --tmin -20 --tmax 20 --step 1 --a 0.1 --out " +
            (d.path / "o.csv").string() + " --plot ''") == 2);
}

TEST_CASE("verify: unknown suite exits 1, mmm-equivalence skips without rates") {
  CHECK(run("verify nonsense") == 1);
  TempDir d;
  const auto out = d.path / "v.json";
  CHECK(run("verify mmm-equivalence --preset brown-resnick", out.string()) == 0);
  CHECK(slurp(out).find("\"skipped\"") != std::string::npos);
}

TEST_CASE("output is byte-identical across worker counts") {
  TempDir d;
  const auto a = d.path / "a.csv", b = d.path / "b.csv";
  const std::string base = "simulate --preset bm-killed --tmin 0 --tmax 2 --step 0.05 --replicas 16 --seed 3 --plot '' ";
  CHECK(run(base + "--workers 1 --out " + a.string()) == 0);
  CHECK(run(base + "--workers 4 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
}

TEST_CASE("rho and limit commands") {
  TempDir d;
  const auto rho = d.path / "rho.csv";
  CHECK(run("rho --preset brown-resnick --t 0,4 --out " + rho.string()) == 0);
  CHECK(slurp(rho).find("4,0.3173105") != std::string::npos);
  const auto lim = d.path / "lim.csv", rep = d.path / "lim.json";
  CHECK(run("limit --alpha 1.5 --n 100 --replicas 200 --out " + lim.string() + " --report " + rep.string()) == 0);
  CHECK(slurp(rep).find("\"theta_alpha\"") != std::string::npos);
  CHECK(run("limit --preset poisson-jump --n 100 --replicas 10 --out " + lim.string()) == 1);  // lattice
}
