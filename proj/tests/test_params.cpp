#include <catch2/catch_amalgamated.hpp>
#include "pzlab/params.hpp"

using namespace pzlab;

static std::map<std::string, double> unit_params() {
  return {{"rho", 1.0}, {"alpha", 1.0}, {"gamma", 1.0}, {"mu", 1.0}, {"xi", 1.0},
          {"eps3", 1.0}, {"a", 1.0},    {"b", 1.0},     {"c", 1.0},  {"d", 1.0},
          {"m", 0.5},    {"L", 1.0}};
}

TEST_CASE("validate accepts the unit scenario") {
  auto r = validate(unit_params());
  REQUIRE(r.ok());
  CHECK(r.params->alpha1() == 2.0);
  CHECK(r.params->alpha2() == 2.0);
}

TEST_CASE("validate flags violations by name") {
  auto raw = unit_params();
  raw["rho"] = -1.0;
  auto r = validate(raw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations == std::vector<std::string>{"NonPositive(rho)"});

  raw = unit_params();
  raw["m"] = 1.5;
  r = validate(raw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations == std::vector<std::string>{"OutOfRange(m)"});

  raw = unit_params();
  raw.erase("d");
  r = validate(raw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations == std::vector<std::string>{"MissingKey(d)"});
}

TEST_CASE("validate-serialize-validate is idempotent") {
  auto r = validate(unit_params());
  REQUIRE(r.ok());
  auto r2 = validate(to_map(*r.params));
  REQUIRE(r2.ok());
  CHECK(to_map(*r2.params) == to_map(*r.params));
}

TEST_CASE("classify partitions the (m,b,c) space") {
  PhysicalParams p;
  p.m = 1.0; p.b = 1.0; p.c = 1.0;
  CHECK(classify(p) == RegimeTag{ThermalLaw::GurtinPipkin, DampingCase::BothDamped});
  p.m = 0.5; p.b = 0.0; p.c = 0.0;
  CHECK(classify(p) == RegimeTag{ThermalLaw::ColemanGurtin, DampingCase::Undamped});
  p.m = 0.0; p.b = 0.0; p.c = 1.0;
  CHECK(classify(p) == RegimeTag{ThermalLaw::Fourier, DampingCase::OnlyZ});

  // exhaustive 3x4 partition, exact-zero comparisons
  int cells = 0;
  for (double m : {0.0, 0.5, 1.0})
    for (double b : {0.0, 1.0})
      for (double c : {0.0, 1.0}) {
        p.m = m; p.b = b; p.c = c;
        auto tag = classify(p);
        (void)tag;
        ++cells;
      }
  CHECK(cells == 12);
  p.b = 1e-300;  // any nonzero is damped
  p.c = 0.0;
  CHECK(classify(p).damping == DampingCase::OnlyX);
}
