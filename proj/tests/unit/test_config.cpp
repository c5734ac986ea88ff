#include <doctest.h>

#include "mg/config.hpp"
#include "mg/error.hpp"

using namespace mg;

namespace {

constexpr const char* kLineConfig = R"(
[run]
name = demo
seed = 7

[line]
q = 2,2,2
radius = 12

[time]
dt = 0.05
t_end = 1
scheme = exact_line

[analysis]
orders = 0, 2.51

[checks]
decay_tol = 1e-3
max_principle = true
)";

ErrorKind kind_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted");
  return ErrorKind::Config;
}

}  // namespace

TEST_CASE("parses a line configuration") {
  const auto c = parse_config(kLineConfig);
  CHECK(c.name == "demo");
  CHECK(c.seed == 7);
  CHECK(c.initial.seed == 7);
  CHECK(c.picard.drift_seed == 8);
  REQUIRE(c.line);
  CHECK(c.line->p == FrequencyVector{1, 1, 1});
  CHECK(c.line_radius == 12);
  CHECK(c.sim.scheme == Scheme::ExactLine);
  CHECK(c.sim.dt == 0.05);
  CHECK(c.sim.sobolev_orders == std::vector<double>{0.0, 2.51});
  CHECK(c.checks.decay_tol == 1e-3);
  CHECK(c.checks.max_principle);
  CHECK_FALSE(c.checks.leakage_max);
}

TEST_CASE("defaults") {
  const auto c = parse_config("[run]\nname = plain\n");
  CHECK(c.grid.N == 8);
  CHECK_FALSE(c.line);
  CHECK(c.sim.model.eps_hyper == 0.0);
  CHECK(c.sim.model.omega_prime == 1.0);
  CHECK(c.sim.constants.C_s == 1.0);
  CHECK(c.picard.source == "frozen");
  CHECK(c.initial.kind == "random_line");
}

TEST_CASE("rejects unknown sections, keys and bad values") {
  CHECK(kind_of("[run]\nname = a\n[tiem]\ndt = 1\n") == ErrorKind::Config);
  CHECK(kind_of("[time]\nt_edn = 1\n") == ErrorKind::Config);
  CHECK(kind_of("stray = 1\n") == ErrorKind::Config);
  CHECK(kind_of("[time]\ndt = fast\n") == ErrorKind::Config);
  CHECK(kind_of("[time]\ndt = 0.1x\n") == ErrorKind::Config);
  CHECK(kind_of("[time]\nscheme = euler\n") == ErrorKind::Config);
  CHECK(kind_of("[time]\ndt = -1\n") == ErrorKind::Config);
  CHECK(kind_of("[grid]\nN = 80\n") == ErrorKind::Config);
  CHECK(kind_of("[checks]\nmax_principle = maybe\n") == ErrorKind::Config);
  CHECK(kind_of("[initial]\nkind = gaussian\n") == ErrorKind::Config);
  CHECK(kind_of("[run]\nname = a/b\n") == ErrorKind::Config);
  CHECK(kind_of("[analysis]\norders = 0,,1\n") == ErrorKind::Config);
  CHECK(kind_of("[line]\nq = 1,1\n") == ErrorKind::Config);
  CHECK(kind_of("[line]\nq = 0,0,0\n") == ErrorKind::ZeroDirection);
  // Degenerate lines parse; the line commands reject them.
  CHECK(parse_config("[line]\nq = 1,1,0\n").line->degenerate());
}

TEST_CASE("seed override and hash") {
  const auto a = parse_config(kLineConfig);
  const auto b = parse_config(kLineConfig);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);

  const auto c = parse_config(kLineConfig, 99);
  CHECK(c.seed == 99);
  CHECK(c.initial.seed == 99);
  CHECK(c.hash() != a.hash());

  // Key order and whitespace do not matter.
  const auto d = parse_config("[checks]\nmax_principle=true\ndecay_tol=1e-3\n[run]\nseed=7\nname=demo\n"
                              "[analysis]\norders = 0, 2.51\n[line]\nradius=12\nq=2,2,2\n"
                              "[time]\nscheme=exact_line\nt_end=1\ndt=0.05\n");
  CHECK(d.hash() == a.hash());
}

TEST_CASE("presets") {
  for (const char* name : {"line-decay-111", "line-decay-011", "energy-law-3d", "support-3d", "picard-frozen",
                           "bootstrap-111", "curved-region", "zero-data"}) {
    CAPTURE(name);
    const auto c = load_config(preset_path(name));
    CHECK(c.name == name);
  }
  CHECK_THROWS_AS(preset_path("no-such-preset"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), Error);
}
