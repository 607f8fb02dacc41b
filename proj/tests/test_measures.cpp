#include <doctest.h>

#include <nlohmann/json.hpp>

#include "vague/measure.hpp"
#include "vague/test_function.hpp"

using namespace vague;
using json = nlohmann::json;

namespace {
GroundSpace e1() { return GroundSpace::euclidean(1); }
GroundSpace hl() { return GroundSpace::halfline_hl(); }
}  // namespace

TEST_CASE("atom merging and ordering") {
  DiscreteMeasure mu(e1(), {{{2.0}, 0.5}, {{1.0}, 1.0}, {{2.0}, 0.25}});
  REQUIRE(mu.size() == 2);
  CHECK(mu.atoms()[0].point == Point{1.0});
  CHECK(mu.atoms()[1].point == Point{2.0});
  CHECK(mu.atoms()[1].weight == doctest::Approx(0.75));
  CHECK(mu.total_mass() == doctest::Approx(1.75));
  CHECK(mu == DiscreteMeasure(e1(), {{{1.0}, 1.0}, {{2.0}, 0.75}}));
  CHECK_THROWS_AS(DiscreteMeasure(e1(), {{{0.0}, -1.0}}), SchemaError);
  CHECK_THROWS_AS(DiscreteMeasure(hl(), {{{0.0}, 1.0}}), SchemaError);
}

TEST_CASE("restrict, mass, boundary mass") {
  DiscreteMeasure mu(e1(), {{{1.0}, 1.0}, {{2.0}, 1.0}, {{3.0}, 1.0}});
  Region b = Region::interval(1.0, 3.0, true, false);  // (1, 3]
  CHECK(mu.mass(b) == doctest::Approx(2.0));
  CHECK(mu.restrict(b).size() == 2);
  CHECK(mu.boundary_mass(b) == doctest::Approx(2.0));  // atoms at 1 and 3
  CHECK(mu.boundary_mass(Region::interval(0.5, 3.5)) == 0.0);
  CHECK(mu.mass(Region::whole_space()) == doctest::Approx(3.0));
}

TEST_CASE("integrate against a test function") {
  DiscreteMeasure mu(e1(), {{{0.0}, 2.0}, {{5.0}, 1.0}});
  TestFunction g2 = TestFunction::bump(e1(), 2);
  // g_2 is 1 on the closed ball of radius 2 and 0 outside radius 3
  CHECK(mu.integrate(g2) == doctest::Approx(2.0));
  TestFunction f = TestFunction::lower_approx(e1(), Region::interval(-1, 1), 4);
  CHECK(mu.integrate(f) == doctest::Approx(2.0));
}

TEST_CASE("point-measure detection") {
  CHECK(DiscreteMeasure(e1(), {{{0.0}, 1.0}, {{1.0}, 3.0}}).is_point_measure());
  CHECK(!DiscreteMeasure(e1(), {{{0.0}, 0.5}}).is_point_measure());
  CHECK(DiscreteMeasure::zero(e1()).is_point_measure());
}

TEST_CASE("add and scale") {
  DiscreteMeasure a = DiscreteMeasure::dirac(e1(), {1.0});
  DiscreteMeasure b = DiscreteMeasure::dirac(e1(), {1.0}, 2.0);
  CHECK(add(a, b).total_mass() == doctest::Approx(3.0));
  CHECK(add(a, b).size() == 1);
  CHECK(scale(a, 0.0).size() == 0);
  CHECK_THROWS_AS(add(a, DiscreteMeasure::dirac(hl(), {1.0})),
                  SpaceMismatchError);
  CHECK_THROWS_AS(scale(a, -1.0), SchemaError);
}

TEST_CASE("locally finite levels from a finite measure") {
  DiscreteMeasure mu(e1(), {{{0.5}, 1.0}, {{2.5}, 1.0}, {{7.0}, 1.0}});
  LocallyFiniteMeasure lf = LocallyFiniteMeasure::from_finite(mu);
  CHECK(lf.level(1).total_mass() == doctest::Approx(1.0));
  CHECK(lf.level(3).total_mass() == doctest::Approx(2.0));
  CHECK(lf.level(8).total_mass() == doctest::Approx(3.0));
  CHECK_THROWS_AS(lf.level(0), SchemaError);
}

TEST_CASE("generator support is checked at materialization") {
  LocallyFiniteMeasure bad(e1(), [](int) {
    return DiscreteMeasure::dirac(e1(), {100.0});
  });
  CHECK_THROWS_AS(bad.level(1), MaterializationError);
}

TEST_CASE("level consistency of a lattice generator") {
  LocallyFiniteMeasure zeta(e1(), [](int m) {
    std::vector<Atom> atoms;
    for (int j = -m; j <= m; ++j)
      if (std::abs(j) < m) atoms.push_back({{double(j)}, 1.0});
    return DiscreteMeasure(e1(), std::move(atoms));
  });
  for (int m = 1; m <= 6; ++m) {
    DiscreteMeasure coarse = zeta.level(m);
    DiscreteMeasure fine = zeta.level(m + 1).restrict(localizing_set(e1(), m));
    CHECK(coarse == fine);
  }
}

TEST_CASE("truncation reweights by the bump") {
  LocallyFiniteMeasure a =
      LocallyFiniteMeasure::from_finite(DiscreteMeasure::dirac(hl(), {0.4}));
  CHECK(truncate(a, 1).size() == 0);  // g_1(0.4) = 0

  LocallyFiniteMeasure b = LocallyFiniteMeasure::from_finite(
      DiscreteMeasure::dirac(hl(), {2.0 / 3.0}));
  DiscreteMeasure tb = truncate(b, 1);
  REQUIRE(tb.size() == 1);
  CHECK(tb.atoms()[0].weight == doctest::Approx(0.5).epsilon(1e-12));

  LocallyFiniteMeasure c =
      LocallyFiniteMeasure::from_finite(DiscreteMeasure::dirac(hl(), {2.0}));
  CHECK(truncate(c, 3).total_mass() == doctest::Approx(1.0));
}

TEST_CASE("measure JSON round trip and strictness") {
  DiscreteMeasure mu(hl(), {{{0.5}, 1.0}, {{2.0}, 0.25}});
  json j = measure_to_json(mu);
  CHECK(measure_from_json(j) == mu);
  j["surprise"] = 1;
  CHECK_THROWS_AS(measure_from_json(j), SchemaError);
  json bad = {{"space", {{"kind", "euclidean"}, {"dim", 1}}},
              {"atoms", {{{"x", {1.0, 2.0}}, {"w", 1.0}}}}};
  CHECK_THROWS_AS(measure_from_json(bad), SchemaError);  // dim mismatch
}
