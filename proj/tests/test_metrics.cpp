#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "vague/metrics.hpp"
#include "vague/rng.hpp"

using namespace vague;

namespace {
GroundSpace e1() { return GroundSpace::euclidean(1); }
GroundSpace hl() { return GroundSpace::halfline_hl(); }

DiscreteMeasure random_prob(const GroundSpace& sp, Rng& rng, int max_atoms) {
  int n = rng.uniform_int(1, max_atoms);
  std::vector<Atom> atoms;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    double x = sp.kind() == SpaceKind::HalflineHL ? rng.uniform(0.2, 3.0)
                                                  : rng.uniform(-3.0, 3.0);
    double w = rng.uniform(0.1, 1.0);
    atoms.push_back({{x}, w});
    total += w;
  }
  for (auto& a : atoms) a.weight /= total;
  return DiscreteMeasure(sp, std::move(atoms));
}
}  // namespace

TEST_CASE("deficiency closed forms") {
  DiscreteMeasure d0 = DiscreteMeasure::dirac(e1(), {0.0});
  DiscreteMeasure d1 = DiscreteMeasure::dirac(e1(), {1.0});
  DeficiencyCertificate half = deficiency(d0, d1, 0.5, MetricChoice::Base);
  CHECK(half.deficiency_value == doctest::Approx(1.0));
  REQUIRE(half.witness_set.size() == 1);
  CHECK(half.witness_set[0] == 0);
  CHECK(deficiency(d0, d1, 1.0, MetricChoice::Base).deficiency_value ==
        doctest::Approx(0.0));

  DiscreteMeasure mix(e1(), {{{0.0}, 0.7}, {{2.0}, 0.3}});
  CHECK(deficiency(mix, d1, 1.0, MetricChoice::Base).deficiency_value ==
        doctest::Approx(0.0));
  CHECK(deficiency(mix, d1, 0.5, MetricChoice::Base).deficiency_value ==
        doctest::Approx(1.0));

  // hu metric blows up near the forbidden point
  DiscreteMeasure p = DiscreteMeasure::dirac(hl(), {0.1});
  DiscreteMeasure q = DiscreteMeasure::dirac(hl(), {0.2});
  CHECK(deficiency(p, q, 1.0, MetricChoice::Hu).deficiency_value ==
        doctest::Approx(1.0));
  CHECK(deficiency(p, q, 5.0, MetricChoice::Hu).deficiency_value ==
        doctest::Approx(0.0));
}

TEST_CASE("prohorov closed forms") {
  DiscreteMeasure d0 = DiscreteMeasure::dirac(e1(), {0.0});
  CHECK(prohorov(d0, DiscreteMeasure::dirac(e1(), {0.3}),
                 MetricChoice::Base) == doctest::Approx(0.3));
  DiscreteMeasure far(e1(), {{{0.0}, 0.8}, {{10.0}, 0.2}});
  CHECK(prohorov(d0, far, MetricChoice::Base) == doctest::Approx(0.2));
  CHECK(prohorov(d0, d0, MetricChoice::Base) == doctest::Approx(0.0));
  CHECK(prohorov(d0, DiscreteMeasure::dirac(e1(), {50.0}),
                 MetricChoice::Base) == doctest::Approx(1.0));
  CHECK_THROWS_AS(
      prohorov(d0, DiscreteMeasure::dirac(e1(), {0.0}, 2.0),
               MetricChoice::Base),
      SchemaError);
  CHECK_THROWS_AS(
      prohorov(d0, DiscreteMeasure::dirac(hl(), {1.0}), MetricChoice::Base),
      SpaceMismatchError);
}

TEST_CASE("prohorov agrees with the subset-enumeration oracle") {
  for (uint64_t s = 0; s < 60; ++s) {
    Rng rng({77, s});
    GroundSpace sp = (s % 2 == 0) ? e1() : hl();
    DiscreteMeasure mu = random_prob(sp, rng, 4);
    DiscreteMeasure nu = random_prob(sp, rng, 4);
    for (MetricChoice mc : {MetricChoice::Base, MetricChoice::Hu}) {
      double fast = prohorov(mu, nu, mc);
      double slow = prohorov_oracle(mu, nu, mc);
      CHECK(std::fabs(fast - slow) <= 1e-12);
      CHECK(std::fabs(prohorov(nu, mu, mc) - fast) <= 1e-12);
    }
  }
}

TEST_CASE("finite-measure distance closed forms") {
  DiscreteMeasure dx = DiscreteMeasure::dirac(e1(), {0.7});
  CHECK(finite_measure_dist(scale(dx, 2.0), dx) == doctest::Approx(1.0));
  CHECK(finite_measure_dist(dx, DiscreteMeasure::zero(e1())) ==
        doctest::Approx(1.0));
  CHECK(finite_measure_dist(dx, dx) == doctest::Approx(0.0));
  CHECK(finite_measure_dist(DiscreteMeasure::zero(e1()),
                            DiscreteMeasure::zero(e1())) == 0.0);
  // mass term plus matched prohorov term
  DiscreteMeasure a = DiscreteMeasure::dirac(e1(), {0.0}, 0.5);
  DiscreteMeasure b = DiscreteMeasure::dirac(e1(), {0.2}, 1.0);
  CHECK(finite_measure_dist(a, b) == doctest::Approx(0.5 + 0.5 * 0.2));
}

TEST_CASE("finite-measure distance triangle inequality") {
  for (uint64_t s = 0; s < 120; ++s) {
    Rng rng({31, s});
    GroundSpace sp = (s % 2 == 0) ? e1() : hl();
    auto rand_finite = [&] {
      DiscreteMeasure p = random_prob(sp, rng, 3);
      return scale(p, rng.uniform(0.0, 2.0));
    };
    DiscreteMeasure a = rand_finite(), b = rand_finite(), c = rand_finite();
    double ab = finite_measure_dist(a, b);
    double bc = finite_measure_dist(b, c);
    double ac = finite_measure_dist(a, c);
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(std::fabs(ab - finite_measure_dist(b, a)) <= 1e-12);
  }
}

TEST_CASE("vague distance series") {
  GroundSpace sp = hl();
  LocallyFiniteMeasure d2 =
      LocallyFiniteMeasure::from_finite(DiscreteMeasure::dirac(sp, {2.0}));
  LocallyFiniteMeasure zero =
      LocallyFiniteMeasure::from_finite(DiscreteMeasure::zero(sp));
  double tol = std::ldexp(1.0, -20);
  VagueDistance v = vague_dist(d2, zero, tol);
  // every truncation sees a unit atom vs nothing, so each term saturates
  CHECK(v.value == doctest::Approx(1.0 - std::ldexp(1.0, -20)).epsilon(1e-12));
  CHECK(v.error_bound <= tol);
  CHECK(vague_dist(d2, d2, 1e-6).value == doctest::Approx(0.0));

  GroundSpace e = e1();
  LocallyFiniteMeasure mu_n = LocallyFiniteMeasure::from_finite(
      DiscreteMeasure::dirac(e, {1.0 + 0.01}));
  LocallyFiniteMeasure mu =
      LocallyFiniteMeasure::from_finite(DiscreteMeasure::dirac(e, {1.0}));
  VagueDistance w = vague_dist(mu_n, mu, 1e-6);
  CHECK(w.value > 0.0);
  CHECK(w.value < 0.05);
  CHECK_THROWS_AS(vague_dist(mu, mu, 0.0), SchemaError);
}

TEST_CASE("vague distance symmetry and triangle on truncations") {
  GroundSpace sp = e1();
  Rng rng(404);
  auto rand_lf = [&] {
    int n = rng.uniform_int(1, 3);
    std::vector<Atom> atoms;
    for (int i = 0; i < n; ++i)
      atoms.push_back({{rng.uniform(-3.0, 3.0)}, rng.uniform(0.2, 1.5)});
    return LocallyFiniteMeasure::from_finite(
        DiscreteMeasure(sp, std::move(atoms)));
  };
  for (int t = 0; t < 25; ++t) {
    LocallyFiniteMeasure a = rand_lf(), b = rand_lf(), c = rand_lf();
    double ab = vague_dist(a, b, 1e-4).value;
    double ba = vague_dist(b, a, 1e-4).value;
    double bc = vague_dist(b, c, 1e-4).value;
    double ac = vague_dist(a, c, 1e-4).value;
    CHECK(std::fabs(ab - ba) <= 1e-12);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("size caps are enforced") {
  std::vector<Atom> many;
  for (int i = 0; i < 9; ++i) many.push_back({{double(i)}, 1.0 / 9});
  DiscreteMeasure big(e1(), many);
  CHECK_THROWS_AS(prohorov_oracle(big, big, MetricChoice::Base), SizeCapError);
  CHECK(prohorov(big, big, MetricChoice::Base) == doctest::Approx(0.0));
}
