#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lbr/format.hpp"
#include "lbr/output.hpp"
#include "lbr/parallel.hpp"

using namespace lbr;

TEST_CASE("format_real round-trips") {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0, -0.0}) CHECK(std::stod(format_real(x)) == x);
  CHECK(format_real(-INFINITY) == "-inf");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(format_real(NAN) == "nan");
  CHECK(format_real(0.5) == "0.5");
}

TEST_CASE("field CSV schema and header") {
  const auto c = preset("bm-killed");
  const auto f = simulate_birth_kill(c, TimeGrid::uniform(-0.5, 0.5, 0.25), 6, RngStream{70, 0});
  RunHeader h{"simulate", config_summary(c), 70, "a=6"};
  std::ostringstream os;
  write_field_csv(os, h, f);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# simulate seed=70 config: family=brownian", 0) == 0);
  CHECK(line.find("theta_minus=1") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "t,eta,argmax_id");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("paths CSV writes -inf for killed points") {
  SampledPath p{TimeGrid({0.0, 1.0}), {0.25, -INFINITY}, 0, 0.5};
  std::ostringstream os;
  write_paths_csv(os, RunHeader{"x", "cfg", 1, ""}, std::span(&p, 1));
  CHECK(os.str().find("1,-inf,0\n") != std::string::npos);
}

TEST_CASE("SVG embeds config and seed") {
  const auto c = preset("brown-resnick");
  const auto f = simulate_two_sided(c, TimeGrid::uniform(-1, 1, 0.05), 6, RngStream{71, 0}, FieldOptions{true});
  std::ostringstream os;
  write_field_svg(os, RunHeader{"simulate", config_summary(c), 71, ""}, f);
  const std::string s = os.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("seed=71") != std::string::npos);
  CHECK(s.find("family=brownian") != std::string::npos);
  CHECK(s.find("<!--") < s.find("-->"));
  // no "--" inside the comment body
  const auto body = s.substr(s.find("<!--") + 4, s.find("-->") - s.find("<!--") - 4);
  CHECK(body.find("--") == std::string::npos);
}

TEST_CASE("parallel_map results do not depend on the worker count") {
  auto f = [](std::size_t i) {
    RandomSource r(RngStream{72, 0}.child(i));
    return r.normal();
  };
  const auto one = parallel_map(500, f, 1);
  const auto four = parallel_map(500, f, 4);
  CHECK(one == four);
  CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int { if (i == 7) throw std::runtime_error("x"); return 1; }, 3),
                  std::runtime_error);
}
