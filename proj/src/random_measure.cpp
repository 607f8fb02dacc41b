#include "vague/random_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vague/rng.hpp"

namespace vague {

using json = nlohmann::json;

namespace {

// stream tags, arbitrary but fixed
constexpr uint64_t kTagCount = 0x636e74;
constexpr uint64_t kTagLoc = 0x6c6f63;
constexpr uint64_t kTagTarget = 0x746774;
constexpr uint64_t kTagSeq = 0x736571;

/// The annuli slicing K_m on the halfline: index 0 is the tail (1, inf),
/// index j >= 1 is (1/(j+1), 1/j].  Levels share a prefix of this list,
/// which is what makes the per-annulus streams couple the levels.
struct Annulus {
  double lo, hi;  // hi may be +inf
};

Annulus annulus_at(int j) {
  if (j == 0) return {1.0, kInf};
  return {1.0 / (j + 1), 1.0 / j};
}

double pareto_sf(double x, double alpha) {
  return x <= 1.0 ? 1.0 : std::pow(x, -alpha);
}

}  // namespace

IntensityMeasure::IntensityMeasure(double c_, double alpha_)
    : c(c_), alpha(alpha_) {
  if (!(c > 0) || !(alpha > 0))
    throw SchemaError("intensity requires c > 0 and alpha > 0");
}

double IntensityMeasure::level_mass(int m) const {
  if (m < 1) throw SchemaError("level must be >= 1");
  return c * std::pow(double(m), alpha) / alpha;
}

double IntensityMeasure::interval_mass(double a, double b) const {
  if (!(a > 0) || !(b > a)) throw SchemaError("bad intensity interval");
  double hi = std::isinf(b) ? 0.0 : std::pow(b, -alpha);
  return c / alpha * (std::pow(a, -alpha) - hi);
}

DiscreteMeasure sample_poisson(const IntensityMeasure& intensity, int m,
                               uint64_t seed) {
  if (m < 1) throw SchemaError("level must be >= 1");
  GroundSpace hl = GroundSpace::halfline_hl();
  std::vector<Atom> atoms;
  double inv = -1.0 / intensity.alpha;
  for (int j = 0; j < m; ++j) {
    Annulus an = annulus_at(j);
    double lambda = intensity.interval_mass(an.lo, an.hi);
    Rng counter({seed, kTagCount, uint64_t(j)});
    int count = counter.poisson(lambda);
    double s_lo = std::isinf(an.hi) ? 0.0 : std::pow(an.hi, -intensity.alpha);
    double s_hi = std::pow(an.lo, -intensity.alpha);
    for (int i = 0; i < count; ++i) {
      Rng loc({seed, kTagLoc, uint64_t(j), uint64_t(i)});
      double s = s_lo + loc.uniform01() * (s_hi - s_lo);
      s = std::max(s, 1e-300);
      atoms.push_back({Point{{std::pow(s, inv)}}, 1.0});
    }
  }
  return DiscreteMeasure(hl, std::move(atoms));
}

DiscreteMeasure sample_empirical_extremes(long n, double alpha, int m,
                                          uint64_t seed) {
  if (n < 1) throw SchemaError("empirical extremes need n >= 1");
  if (!(alpha > 0)) throw SchemaError("empirical extremes need alpha > 0");
  if (m < 1) throw SchemaError("level must be >= 1");
  GroundSpace hl = GroundSpace::halfline_hl();
  double scale = std::pow(double(n), 1.0 / alpha);
  std::vector<Atom> atoms;
  long remaining = n;
  // Walk the annuli from the top of the halfline down.  The unconditional
  // annulus probabilities p_j sum the Pareto law; drawing
  // Binomial(remaining, p_j / mass-not-yet-placed) sequentially realizes
  // the exact multinomial joint law while touching only K_m.
  for (int j = 0; j < m && remaining > 0; ++j) {
    Annulus an = annulus_at(j);
    double sf_hi =
        std::isinf(an.hi) ? 0.0 : pareto_sf(an.hi * scale, alpha);
    double sf_lo = pareto_sf(an.lo * scale, alpha);
    double p = sf_lo - sf_hi;
    double denom = 1.0 - sf_hi;  // mass not yet allocated to higher annuli
    double cond = denom > 0 ? std::min(1.0, p / denom) : 0.0;
    Rng counter({seed, kTagCount, uint64_t(j)});
    int count = counter.binomial(int(remaining), cond);
    remaining -= count;
    for (int i = 0; i < count; ++i) {
      Rng loc({seed, kTagLoc, uint64_t(j), uint64_t(i)});
      double s = sf_hi + loc.uniform01() * (sf_lo - sf_hi);
      s = std::max(s, 1e-300);
      double raw = s < 1.0 ? std::pow(s, -1.0 / alpha) : 1.0;
      atoms.push_back({Point{{raw / scale}}, 1.0});
    }
  }
  return DiscreteMeasure(hl, std::move(atoms));
}

RandomMeasureModel RandomMeasureModel::poisson(
    const IntensityMeasure& intensity) {
  RandomMeasureModel model;
  model.space = GroundSpace::halfline_hl();
  model.label = "poisson(c=" + std::to_string(intensity.c) +
                ",alpha=" + std::to_string(intensity.alpha) + ")";
  model.sampler = [intensity](int m, uint64_t seed) {
    return sample_poisson(intensity, m, seed);
  };
  model.laplace_exact = [intensity](const TestFunction& f) {
    return laplace_poisson_exact(intensity, f);
  };
  return model;
}

RandomMeasureModel RandomMeasureModel::empirical_extremes(long n,
                                                          double alpha) {
  if (n < 1) throw SchemaError("empirical extremes need n >= 1");
  if (!(alpha > 0)) throw SchemaError("empirical extremes need alpha > 0");
  RandomMeasureModel model;
  model.space = GroundSpace::halfline_hl();
  model.label = "empirical_extremes(n=" + std::to_string(n) +
                ",alpha=" + std::to_string(alpha) + ")";
  model.sampler = [n, alpha](int m, uint64_t seed) {
    return sample_empirical_extremes(n, alpha, m, seed);
  };
  return model;
}

RandomMeasureModel RandomMeasureModel::deterministic(
    const DiscreteMeasure& mu) {
  RandomMeasureModel model;
  model.space = mu.space();
  model.label = "deterministic";
  model.sampler = [mu](int m, uint64_t) {
    return mu.restrict(localizing_set(mu.space(), m));
  };
  model.laplace_exact = [mu](const TestFunction& f) {
    DiscreteMeasure part =
        mu.restrict(localizing_set(mu.space(), f.support_level()));
    return std::exp(-part.integrate(f));
  };
  return model;
}

namespace {

LaplaceEstimate laplace_mc_impl(const RandomMeasureModel& model,
                                const TestFunction& f, long reps,
                                uint64_t seed, bool parallel) {
  if (reps < 100) throw SchemaError("laplace_mc requires reps >= 100");
  if (!model.sampler) throw SchemaError("model has no sampler");
  if (!(f.space() == model.space))
    throw SpaceMismatchError("test function and model space differ");
  int level = f.support_level();
  std::vector<double> vals(static_cast<size_t>(reps));
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long r = 0; r < reps; ++r) {
    DiscreteMeasure sample = model.sampler(level, Rng::derive(seed, r));
    vals[size_t(r)] = std::exp(-sample.integrate(f));
  }
  (void)parallel;
  // accumulate in replication order so scheduling cannot change the result
  double sum = 0;
  for (double v : vals) sum += v;
  double mean = sum / double(reps);
  double ss = 0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  LaplaceEstimate out;
  out.estimate = mean;
  out.std_error =
      reps > 1 ? std::sqrt(ss / double(reps - 1) / double(reps)) : 0.0;
  return out;
}

}  // namespace

LaplaceEstimate laplace_mc(const RandomMeasureModel& model,
                           const TestFunction& f, long reps, uint64_t seed) {
  return laplace_mc_impl(model, f, reps, seed, true);
}

LaplaceEstimate laplace_mc_serial(const RandomMeasureModel& model,
                                  const TestFunction& f, long reps,
                                  uint64_t seed) {
  return laplace_mc_impl(model, f, reps, seed, false);
}

namespace {

struct Quadrature {
  std::function<double(double)> g;
  int max_depth = 60;

  double simpson(double a, double b, double fa, double fm, double fb) const {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) const {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = g(lm), frm = g(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth)
      throw QuadratureError("adaptive quadrature hit the depth cap");
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  // Seeds the adaptive pass with a uniform panel grid so that narrow
  // features cannot slip between the three initial Simpson samples.
  double integrate(double a, double b, double tol, int panels = 256) const {
    double h = (b - a) / panels;
    double total = 0;
    double abs_tol = tol / panels;
    for (int k = 0; k < panels; ++k) {
      double lo = a + k * h, hi = a + (k + 1) * h;
      double fa = g(lo), fb = g(hi), fm = g(0.5 * (lo + hi));
      double whole = simpson(lo, hi, fa, fm, fb);
      total += refine(lo, hi, fa, fm, fb, whole, abs_tol, 0);
    }
    return total;
  }
};

}  // namespace

double laplace_poisson_exact(const IntensityMeasure& intensity,
                             const TestFunction& f, double quad_tol) {
  if (!(f.space() == GroundSpace::halfline_hl()))
    throw SpaceMismatchError(
        "closed-form Laplace functional is for halfline intensities");
  if (!(quad_tol > 0)) throw SchemaError("quad_tol must be > 0");
  int level = f.support_level();
  // substitute u = x^-alpha: the exponent becomes
  // (c/alpha) * int_0^{level^alpha} (1 - e^{-f(u^{-1/alpha})}) du,
  // bounded integrand, no endpoint singularity for any alpha > 0
  double upper = std::pow(double(level), intensity.alpha);
  double inv = -1.0 / intensity.alpha;
  Quadrature q;
  q.g = [&](double u) {
    double x = u > 0 ? std::pow(u, inv) : 1e300;
    return 1.0 - std::exp(-f(Point{{x}}));
  };
  double integral =
      intensity.c / intensity.alpha * q.integrate(0.0, upper, quad_tol);
  return std::exp(-integral);
}

LaplaceReport test_convergence_in_distribution(
    const std::function<RandomMeasureModel(long)>& seq,
    const RandomMeasureModel& target, const FunctionFamily& battery,
    const std::vector<long>& n_grid, long reps, uint64_t seed,
    double z_threshold) {
  if (battery.members.empty()) throw SchemaError("empty function battery");
  if (n_grid.empty()) throw SchemaError("n_grid must be nonempty");
  if (!(z_threshold > 0)) throw SchemaError("z_threshold must be > 0");
  size_t nf = battery.members.size();
  std::vector<double> exact(nf), exact_err(nf, 0.0);
  for (size_t i = 0; i < nf; ++i) {
    if (target.laplace_exact) {
      exact[i] = target.laplace_exact(battery.members[i]);
    } else {
      // no closed form: a large-reps MC stands in, with pooled stderr
      LaplaceEstimate e =
          laplace_mc(target, battery.members[i], reps * 10,
                     Rng::derive(seed, kTagTarget, i));
      exact[i] = e.estimate;
      exact_err[i] = e.std_error;
    }
  }
  LaplaceReport report;
  report.z_threshold = z_threshold;
  std::vector<double> max_abs_z(n_grid.size(), 0.0);
  for (size_t ni = 0; ni < n_grid.size(); ++ni) {
    RandomMeasureModel model = seq(n_grid[ni]);
    for (size_t i = 0; i < nf; ++i) {
      LaplaceEstimate e =
          laplace_mc(model, battery.members[i], reps,
                     Rng::derive(seed, kTagSeq + ni, i));
      LaplaceRow row;
      row.f_id = "f" + std::to_string(i);
      row.n = n_grid[ni];
      row.estimate = e.estimate;
      row.std_error = e.std_error;
      row.exact = exact[i];
      row.exact_error = exact_err[i];
      double pooled = std::hypot(e.std_error, exact_err[i]);
      double diff = e.estimate - exact[i];
      row.z = pooled > 0 ? diff / pooled
                         : (diff == 0 ? 0.0 : std::copysign(kInf, diff));
      max_abs_z[ni] = std::max(max_abs_z[ni], std::fabs(row.z));
      report.rows.push_back(std::move(row));
    }
  }
  bool final_ok = max_abs_z.back() <= z_threshold;
  bool settling = n_grid.size() < 2 ||
                  max_abs_z.back() <= max_abs_z[n_grid.size() - 2] + 1e-12;
  report.pass = final_ok && settling;
  report.verdict_note =
      report.pass
          ? "consistent with convergence in distribution (a finite battery "
            "cannot confirm it)"
          : "refuted at the tested battery and grid";
  return report;
}

RandomMeasureModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw SchemaError("model descriptor needs a \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  auto require_keys = [&](std::initializer_list<const char*> keys) {
    for (auto& [key, value] : j.items()) {
      (void)value;
      bool ok = key == "kind";
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) throw SchemaError("unknown model field: " + key);
    }
    for (const char* k : keys)
      if (!j.contains(k))
        throw SchemaError("model field missing: " + std::string(k));
  };
  if (kind == "poisson") {
    require_keys({"c", "alpha"});
    return RandomMeasureModel::poisson(
        IntensityMeasure(j.at("c").get<double>(),
                         j.at("alpha").get<double>()));
  }
  if (kind == "empirical_extremes") {
    require_keys({"n", "alpha"});
    return RandomMeasureModel::empirical_extremes(
        j.at("n").get<long>(), j.at("alpha").get<double>());
  }
  throw SchemaError("unknown model kind: " + kind);
}

json laplace_report_to_json(const LaplaceReport& r) {
  json j;
  j["pass"] = r.pass;
  j["z_threshold"] = r.z_threshold;
  j["note"] = r.verdict_note;
  j["rows"] = json::array();
  for (const LaplaceRow& row : r.rows) {
    json rj;
    rj["f_id"] = row.f_id;
    rj["n"] = row.n;
    rj["estimate"] = row.estimate;
    rj["stderr"] = row.std_error;
    rj["exact"] = row.exact;
    if (row.exact_error > 0) rj["exact_stderr"] = row.exact_error;
    rj["z"] = row.z;
    j["rows"].push_back(std::move(rj));
  }
  return j;
}

std::string laplace_report_csv(const LaplaceReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "f_id,n,estimate,stderr,exact,z\n";
  for (const LaplaceRow& row : r.rows)
    out << row.f_id << ',' << row.n << ',' << row.estimate << ','
        << row.std_error << ',' << row.exact << ',' << row.z << '\n';
  return out.str();
}

}  // namespace vague
