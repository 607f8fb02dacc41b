#include "vague/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "vague/convergence.hpp"
#include "vague/metrics.hpp"
#include "vague/random_measure.hpp"
#include "vague/rng.hpp"

namespace vague {

namespace {

Point random_point(const GroundSpace& sp, Rng& rng) {
  std::vector<double> c(size_t(sp.dim()));
  if (sp.kind() == SpaceKind::HalflineHL) {
    c[0] = rng.uniform(0.2, 3.0);
  } else if (sp.kind() == SpaceKind::Punctured) {
    double norm = 0;
    do {
      norm = 0;
      for (double& v : c) {
        v = rng.uniform(-3.0, 3.0);
        norm += v * v;
      }
    } while (std::sqrt(norm) < 0.2);
  } else {
    for (double& v : c) v = rng.uniform(-3.0, 3.0);
  }
  return Point{std::move(c)};
}

DiscreteMeasure random_prob_measure(const GroundSpace& sp, Rng& rng,
                                    int max_atoms) {
  int k = rng.uniform_int(1, max_atoms);
  std::vector<Atom> atoms;
  double total = 0;
  for (int i = 0; i < k; ++i) {
    atoms.push_back({random_point(sp, rng), rng.uniform(0.1, 1.0)});
    total += atoms.back().weight;
  }
  for (Atom& a : atoms) a.weight /= total;
  return DiscreteMeasure(sp, std::move(atoms));
}

DiscreteMeasure random_finite_measure(const GroundSpace& sp, Rng& rng,
                                      int max_atoms) {
  int k = rng.uniform_int(0, max_atoms);
  std::vector<Atom> atoms;
  for (int i = 0; i < k; ++i)
    atoms.push_back({random_point(sp, rng), rng.uniform(0.1, 1.5)});
  return DiscreteMeasure(sp, std::move(atoms));
}

std::vector<GroundSpace> all_kinds() {
  return {GroundSpace::euclidean(1), GroundSpace::weak(1),
          GroundSpace::punctured(1), GroundSpace::halfline_hl()};
}

struct Tally {
  long checks = 0;
  long violations = 0;
  double worst = 0;

  void count(bool ok, double err = 0) {
    ++checks;
    if (!ok) ++violations;
    worst = std::max(worst, err);
  }
  bool clean() const { return checks > 0 && violations == 0; }
};

// --- criterion 1: exact Prohorov vs subset-enumeration oracle -------------

CriterionResult criterion1() {
  CriterionResult r{1, "prohorov equals brute-force oracle", false, "", 0};
  auto spaces = all_kinds();
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const GroundSpace& sp = spaces[size_t(i % 4)];
    Rng rng({101, uint64_t(i)});
    DiscreteMeasure mu = random_prob_measure(sp, rng, 5);
    DiscreteMeasure nu = random_prob_measure(sp, rng, 5);
    double fast = prohorov(mu, nu, MetricChoice::Hu);
    double slow = prohorov_oracle(mu, nu, MetricChoice::Hu);
    worst = std::max(worst, std::fabs(fast - slow));
  }
  r.pass = worst <= 1e-12;
  std::ostringstream d;
  d << "200 instances, max |exact - oracle| = " << worst;
  r.detail = d.str();
  return r;
}

// --- criterion 2: metric axioms -------------------------------------------

CriterionResult criterion2() {
  CriterionResult r{2, "metric axioms (hu, prohorov, rho_hat, rho_tilde)",
                    false, "", 0};
  Tally t;
  for (const GroundSpace& sp : all_kinds()) {
    for (int i = 0; i < 10000; ++i) {
      Rng rng({202, uint64_t(sp.kind()), uint64_t(i)});
      Point x = random_point(sp, rng), y = random_point(sp, rng),
            z = random_point(sp, rng);
      t.count(sp.hu_dist(x, y) == sp.hu_dist(y, x));
      t.count(sp.hu_dist(x, x) == 0.0);
      t.count(x == y || sp.hu_dist(x, y) > 0);
      double slack = sp.hu_dist(x, z) - sp.hu_dist(x, y) - sp.hu_dist(y, z);
      t.count(slack <= 1e-12, slack);
    }
  }
  for (const GroundSpace& sp : all_kinds()) {
    for (int i = 0; i < 250; ++i) {
      Rng rng({203, uint64_t(sp.kind()), uint64_t(i)});
      DiscreteMeasure a = random_prob_measure(sp, rng, 4);
      DiscreteMeasure b = random_prob_measure(sp, rng, 4);
      DiscreteMeasure c = random_prob_measure(sp, rng, 4);
      double ab = prohorov(a, b, MetricChoice::Hu);
      t.count(std::fabs(ab - prohorov(b, a, MetricChoice::Hu)) <= 1e-12);
      t.count(prohorov(a, a, MetricChoice::Hu) <= 1e-12);
      double slack = prohorov(a, c, MetricChoice::Hu) - ab -
                     prohorov(b, c, MetricChoice::Hu);
      t.count(slack <= 1e-9, slack);
    }
  }
  for (const GroundSpace& sp : all_kinds()) {
    for (int i = 0; i < 250; ++i) {
      Rng rng({204, uint64_t(sp.kind()), uint64_t(i)});
      DiscreteMeasure a = random_finite_measure(sp, rng, 4);
      DiscreteMeasure b = random_finite_measure(sp, rng, 4);
      DiscreteMeasure c = random_finite_measure(sp, rng, 4);
      double ab = finite_measure_dist(a, b);
      t.count(std::fabs(ab - finite_measure_dist(b, a)) <= 1e-12);
      t.count(finite_measure_dist(a, a) <= 1e-12);
      double slack =
          finite_measure_dist(a, c) - ab - finite_measure_dist(b, c);
      t.count(slack <= 1e-9, slack);
    }
  }
  for (const GroundSpace& sp : all_kinds()) {
    for (int i = 0; i < 60; ++i) {
      Rng rng({205, uint64_t(sp.kind()), uint64_t(i)});
      auto lf = [&sp](const DiscreteMeasure& m) {
        return LocallyFiniteMeasure::from_finite(m);
      };
      LocallyFiniteMeasure a = lf(random_finite_measure(sp, rng, 3));
      LocallyFiniteMeasure b = lf(random_finite_measure(sp, rng, 3));
      LocallyFiniteMeasure c = lf(random_finite_measure(sp, rng, 3));
      double ab = vague_dist(a, b, 1e-4).value;
      t.count(std::fabs(ab - vague_dist(b, a, 1e-4).value) <= 1e-12);
      t.count(vague_dist(a, a, 1e-4).value <= 1e-12);
      double slack =
          vague_dist(a, c, 1e-4).value - ab - vague_dist(b, c, 1e-4).value;
      t.count(slack <= 1e-9, slack);
    }
  }
  r.pass = t.clean();
  std::ostringstream d;
  d << t.checks << " checks, " << t.violations
    << " violations, worst triangle slack " << t.worst;
  r.detail = d.str();
  return r;
}

// --- criterion 3: metric boundedness matches the localizing sets ----------

CriterionResult criterion3() {
  CriterionResult r{3, "hu-bounded sets coincide with the boundedness", false,
                    "", 0};
  Tally t;
  std::vector<GroundSpace> spaces = {GroundSpace::halfline_hl(),
                                     GroundSpace::punctured(2)};
  for (const GroundSpace& sp : spaces) {
    for (int m = 1; m <= 10; ++m) {
      double bound = std::max(1.0, double(m));
      for (int i = 0; i < 200; ++i) {
        Rng rng({303, uint64_t(sp.kind()), uint64_t(m), uint64_t(i)});
        auto sample = [&]() {
          double radius = rng.uniform(1.0 / m + 1e-9, double(m) + 10.0);
          if (sp.dim() == 1) return Point{{radius}};
          double ang = rng.uniform(0.0, 6.28318530717958648);
          return Point{{radius * std::cos(ang), radius * std::sin(ang)}};
        };
        Point x = sample(), y = sample();
        double d = sp.hu_dist(x, y);
        t.count(std::isfinite(d) && d <= bound, d - bound);
      }
    }
    // approaching the forbidden set blows up the hu distance to a base point
    Point base = sp.dim() == 1 ? Point{{1.0}} : Point{{1.0, 0.0}};
    double prev = -kInf;
    for (int k = 0; k < 20; ++k) {
      double radius = 1.0 / (k + 2);
      Point x = sp.dim() == 1 ? Point{{radius}} : Point{{radius, 0.0}};
      double d = sp.hu_dist(base, x);
      t.count(d > prev);
      prev = d;
    }
    t.count(prev >= 20.0);  // unbounded growth, not a plateau
  }
  r.pass = t.clean();
  std::ostringstream d;
  d << t.checks << " checks, " << t.violations << " violations";
  r.detail = d.str();
  return r;
}

// --- criterion 4: the four convergence checkers agree ---------------------

CriterionResult criterion4() {
  CriterionResult r{4, "checker equivalence on the sequence catalogue", false,
                    "", 0};
  std::vector<long> n_grid = {10, 100, 1000, 10000};
  double tol = 1e-3;
  std::vector<std::pair<std::string, TriState>> expected = {
      {"delta_shift", TriState::Pass}, {"vanishing_hl", TriState::Pass},
      {"mass_fade", TriState::Pass},   {"lattice", TriState::Pass},
      {"escape", TriState::Fail},      {"wrong_limit", TriState::Fail},
      {"oscillate", TriState::Fail},   {"mass_blowup", TriState::Fail}};
  Tally t;
  std::ostringstream log;
  for (const auto& [name, want] : expected) {
    MeasureSequence seq = catalogue_sequence(name);
    FunctionFamily battery = default_battery(seq, 4, 2024);
    CrossValidationReport rep = cross_validate(
        seq, battery, default_probe_regions(seq), n_grid, tol);
    bool ok = rep.agreement && rep.consensus == want;
    t.count(ok);
    if (!ok) {
      log << " [" << name << ": consensus " << tri_state_name(rep.consensus)
          << (rep.agreement ? "" : ", checkers disagree");
      for (const auto& [cname, v] : rep.checker_verdicts)
        log << ' ' << cname << '=' << tri_state_name(v.converged);
      log << ']';
    }
  }
  // the same vanishing sequence, embedded in weak(1): the mass does not
  // escape, so delta_0 is the limit and the null measure is not
  MeasureSequence weak_seq = catalogue_sequence("vanishing_weak");
  std::vector<Region> probes = default_probe_regions(weak_seq);
  Verdict to_delta0 = check_portmanteau(weak_seq, probes, n_grid, tol);
  t.count(to_delta0.converged == TriState::Pass);
  MeasureSequence to_null{weak_seq.space, weak_seq.generator,
                          LocallyFiniteMeasure::from_finite(
                              DiscreteMeasure::zero(weak_seq.space)),
                          "vanishing_weak_vs_null"};
  Verdict null_verdict = check_portmanteau(to_null, probes, n_grid, tol);
  t.count(null_verdict.converged == TriState::Fail);
  r.pass = t.clean();
  std::ostringstream d;
  d << t.checks << " sequences checked, " << t.violations << " wrong"
    << log.str();
  r.detail = d.str();
  return r;
}

// --- criterion 5: monotone approximants sandwich the indicator ------------

CriterionResult criterion5() {
  CriterionResult r{5, "approximants: sandwich, monotone, exact clipping",
                    false, "", 0};
  Tally t;
  struct Case {
    GroundSpace sp;
    Region B;
    double grid_lo, grid_hi;
  };
  std::vector<Case> cases = {
      {GroundSpace::euclidean(1), Region::interval(0.0, 1.0), -3.0, 4.0},
      {GroundSpace::halfline_hl(), Region::annulus(1.0, 2.0), 0.05, 5.0}};
  for (const Case& cs : cases) {
    std::vector<int> ms;
    for (int m = 1; m <= 1024; m *= 2) ms.push_back(m);
    for (int gi = 0; gi < 1000; ++gi) {
      Point x{{cs.grid_lo + (cs.grid_hi - cs.grid_lo) * gi / 999.0}};
      double ind_cl = region_in_closure(cs.sp, cs.B, x) ? 1.0 : 0.0;
      double ind_int = region_in_interior(cs.sp, cs.B, x) ? 1.0 : 0.0;
      double prev_up = 2.0, prev_lo = -1.0;
      for (int m : ms) {
        double up = TestFunction::upper_approx(cs.sp, cs.B, m)(x);
        double lo = TestFunction::lower_approx(cs.sp, cs.B, m)(x);
        t.count(lo <= ind_int && ind_cl <= up);  // sandwich, exact
        t.count(up <= prev_up && lo >= prev_lo);  // monotone in m, exact
        prev_up = up;
        prev_lo = lo;
      }
      // points a positive distance from the boundary are clipped exactly
      double d_out = region_distance(cs.sp, x, cs.B, MetricChoice::Hu);
      double d_in = region_interior_depth(cs.sp, x, cs.B, MetricChoice::Hu);
      if (d_out >= 0.1) t.count(prev_up == 0.0 && prev_lo == 0.0);
      if (d_in >= 0.1) t.count(prev_up == 1.0 && prev_lo == 1.0);
    }
    // bump sandwich 1_{cl K_m} <= g_m <= 1_{K_{m+1}} on the same grid; this
    // is what the fault-injection flag breaks
    for (int m : {1, 2, 4}) {
      Region km = localizing_set(cs.sp, m);
      Region km1 = localizing_set(cs.sp, m + 1);
      for (int gi = 0; gi < 1000; ++gi) {
        Point x{{cs.grid_lo + (cs.grid_hi - cs.grid_lo) * gi / 999.0}};
        if (!cs.sp.contains(x)) continue;
        double g = cs.sp.bump(m, x);
        t.count(g >= 0.0 && g <= 1.0);
        if (region_in_closure(cs.sp, km, x)) t.count(g == 1.0);
        if (!region_contains(cs.sp, km1, x)) t.count(g == 0.0);
      }
    }
  }
  r.pass = t.clean();
  std::ostringstream d;
  d << t.checks << " checks, " << t.violations << " violations";
  r.detail = d.str();
  return r;
}

// --- criterion 6: Poisson sampler statistics ------------------------------

CriterionResult criterion6() {
  CriterionResult r{6, "poisson sampler mean/variance/independence", false,
                    "", 0};
  Tally t;
  const int reps = 10000;
  std::ostringstream log;
  for (double lambda : {0.5, 1.0, 5.0}) {
    IntensityMeasure intensity(lambda / 2.0, 1.0);  // level-2 mass = lambda
    std::vector<double> total(reps), upper(reps), lower(reps);
    for (int s = 0; s < reps; ++s) {
      DiscreteMeasure mu =
          sample_poisson(intensity, 2, Rng::derive(606, uint64_t(lambda * 2),
                                                   uint64_t(s)));
      double hi = 0, lo = 0;
      for (const Atom& a : mu.atoms())
        (a.point.coords[0] > 1.0 ? hi : lo) += a.weight;
      total[size_t(s)] = hi + lo;
      upper[size_t(s)] = hi;
      lower[size_t(s)] = lo;
    }
    auto mean = [&](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / double(v.size());
    };
    double m_tot = mean(total), m_hi = mean(upper), m_lo = mean(lower);
    double var = 0, cov = 0;
    for (int s = 0; s < reps; ++s) {
      var += (total[size_t(s)] - m_tot) * (total[size_t(s)] - m_tot);
      cov += (upper[size_t(s)] - m_hi) * (lower[size_t(s)] - m_lo);
    }
    var /= reps - 1;
    cov /= reps - 1;
    double half = lambda / 2.0;
    bool mean_ok = std::fabs(m_tot - lambda) <= 4.0 * std::sqrt(lambda / reps);
    bool var_ok = std::fabs(var - lambda) <= 0.10 * lambda;
    bool cov_ok = std::fabs(cov) <= 4.0 * half / std::sqrt(double(reps));
    t.count(mean_ok);
    t.count(var_ok);
    t.count(cov_ok);
    log << " [lambda " << lambda << ": mean " << m_tot << " var " << var
        << " cov " << cov << ']';
  }
  r.pass = t.clean();
  r.detail = std::to_string(t.violations) + " violations" + log.str();
  return r;
}

// --- criterion 7: MC Laplace vs quadrature --------------------------------

CriterionResult criterion7() {
  CriterionResult r{7, "laplace MC agrees with quadrature", false, "", 0};
  GroundSpace hl = GroundSpace::halfline_hl();
  IntensityMeasure intensity(1.0, 1.0);
  RandomMeasureModel model = RandomMeasureModel::poisson(intensity);
  FunctionFamily battery = lipschitz_battery(hl, 10, 707);
  int agree = 0, total = 0;
  std::ostringstream log;
  for (size_t i = 0; i < battery.members.size() && total < 10; ++i) {
    const TestFunction& f = battery.members[i];
    LaplaceEstimate mc = laplace_mc(model, f, 10000, Rng::derive(707, i));
    double exact = laplace_poisson_exact(intensity, f);
    ++total;
    if (std::fabs(mc.estimate - exact) <= 3.0 * mc.std_error + 1e-12)
      ++agree;
    else
      log << " [f" << i << ": mc " << mc.estimate << " +- " << mc.std_error
          << " vs " << exact << ']';
  }
  r.pass = total == 10 && agree >= 9;
  r.detail = std::to_string(agree) + "/10 within 3 stderr" + log.str();
  return r;
}

// --- criteria 8 and 9: convergence in distribution ------------------------

CriterionResult distribution_criterion(int id, const char* name,
                                       const FunctionFamily& battery,
                                       uint64_t seed) {
  CriterionResult r{id, name, false, "", 0};
  IntensityMeasure unit(1.0, 1.0);
  RandomMeasureModel target = RandomMeasureModel::poisson(unit);
  auto seq = [](long n) { return RandomMeasureModel::empirical_extremes(n, 1.0); };
  LaplaceReport pos = test_convergence_in_distribution(
      seq, target, battery, {100, 1000, 10000}, 10000, seed);
  double pos_max_z = 0;
  for (const LaplaceRow& row : pos.rows)
    if (row.n == 10000) pos_max_z = std::max(pos_max_z, std::fabs(row.z));
  // negative control: the doubled intensity has a strictly smaller exact
  // Laplace functional, so the z-scores blow up with reps
  RandomMeasureModel doubled =
      RandomMeasureModel::poisson(IntensityMeasure(2.0, 1.0));
  auto bad_seq = [doubled](long) { return doubled; };
  LaplaceReport neg = test_convergence_in_distribution(
      bad_seq, target, battery, {10000}, 10000, Rng::derive(seed, 99));
  double neg_max_z = 0;
  for (const LaplaceRow& row : neg.rows)
    neg_max_z = std::max(neg_max_z, std::fabs(row.z));
  r.pass = pos.pass && !neg.pass && neg_max_z > 5.0;
  std::ostringstream d;
  d << "extremes-vs-poisson " << (pos.pass ? "pass" : "FAIL") << " (max |z| "
    << pos_max_z << " at n=10^4), control " << (neg.pass ? "PASS" : "fail")
    << " (max |z| " << neg_max_z << ')';
  r.detail = d.str();
  return r;
}

CriterionResult criterion8() {
  return distribution_criterion(
      8, "extremes converge to poisson (lipschitz battery)",
      lipschitz_battery(GroundSpace::halfline_hl(), 8, 808), 808);
}

CriterionResult criterion9() {
  return distribution_criterion(
      9, "extremes converge to poisson (multiplicative family)",
      multiplicative_family(GroundSpace::halfline_hl(), 3, 909), 909);
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
  std::vector<std::function<CriterionResult()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  std::vector<CriterionResult> out;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = criteria[i]();
    } catch (const std::exception& e) {
      res.id = int(i) + 1;
      res.name = "criterion " + std::to_string(i + 1);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    out.push_back(std::move(res));
  }
  return out;
}

bool print_acceptance(const std::vector<CriterionResult>& results) {
  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    std::printf("%s criterion-%d %s (%s) [%.1fs]\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return all;
}

}  // namespace vague
