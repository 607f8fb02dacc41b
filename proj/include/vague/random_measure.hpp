#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/measure.hpp"
#include "vague/test_function.hpp"

namespace vague {

/// Power-law intensity with density c * x^(-alpha-1) on the halfline
/// (0, inf); each localizing set carries the finite mass c * m^alpha / alpha.
struct IntensityMeasure {
  double c = 1.0;
  double alpha = 1.0;

  IntensityMeasure(double c_, double alpha_);

  double level_mass(int m) const;
  /// Integral of the density over (a, b]; b may be +inf.
  double interval_mass(double a, double b) const;
};

/// Seeded sampler for a random measure together with an optional closed-form
/// Laplace functional.  Samplers are pure in (level, seed) and level
/// consistent: restricting the level-(m+1) sample to K_m reproduces the
/// level-m sample for the same seed.
struct RandomMeasureModel {
  GroundSpace space = GroundSpace::halfline_hl();
  std::string label;
  std::function<DiscreteMeasure(int, uint64_t)> sampler;
  std::function<double(const TestFunction&)> laplace_exact;  // may be empty

  static RandomMeasureModel poisson(const IntensityMeasure& intensity);
  static RandomMeasureModel empirical_extremes(long n, double alpha);
  /// Degenerate model: every realization equals mu.
  static RandomMeasureModel deterministic(const DiscreteMeasure& mu);
};

/// Poisson point process with the given power-law intensity, restricted to
/// K_m.  Per-annulus streams keyed by (seed, annulus) give the coupling that
/// makes levels consistent by construction.
DiscreteMeasure sample_poisson(const IntensityMeasure& intensity, int m,
                               uint64_t seed);

/// sum_i delta_{X_i / n^(1/alpha)} restricted to K_m, with X_1..X_n i.i.d.
/// Pareto(alpha) (P(X > x) = x^-alpha for x >= 1).  Only the points landing
/// in K_m are materialized: annulus counts follow the exact multinomial law
/// via sequential conditional binomials on per-annulus streams.
DiscreteMeasure sample_empirical_extremes(long n, double alpha, int m,
                                          uint64_t seed);

struct LaplaceEstimate {
  double estimate = 0;
  double std_error = 0;  // sample std / sqrt(reps)
};

/// Monte-Carlo estimate of E[e^{-N(f)}] over reps independent realizations
/// sampled at level f.support_level().  Deterministic in (seed, reps): each
/// replication uses a derived seed and results accumulate in replication
/// order regardless of scheduling.
LaplaceEstimate laplace_mc(const RandomMeasureModel& model,
                           const TestFunction& f, long reps, uint64_t seed);
/// Serial reference implementation with identical output; kept for testing
/// the parallel path and for the benchmark.
LaplaceEstimate laplace_mc_serial(const RandomMeasureModel& model,
                                  const TestFunction& f, long reps,
                                  uint64_t seed);

/// exp(-int (1 - e^{-f(x)}) c x^(-alpha-1) dx) by adaptive Simpson after the
/// substitution u = x^-alpha (which removes the power-law weight), relative
/// tolerance quad_tol, recursion depth capped at 60.
double laplace_poisson_exact(const IntensityMeasure& intensity,
                             const TestFunction& f, double quad_tol = 1e-8);

struct LaplaceRow {
  std::string f_id;
  long n = 0;
  double estimate = 0;
  double std_error = 0;
  double exact = 0;        // target value (closed form or large-reps MC)
  double exact_error = 0;  // 0 when the target is closed form
  double z = 0;
};

struct LaplaceReport {
  std::vector<LaplaceRow> rows;
  bool pass = false;
  double z_threshold = 3.0;
  std::string verdict_note;
};

/// z-tests laplace_mc(N_n, f) against the target per battery function and
/// grid point.  Pass iff at the largest n all |z| <= z_threshold and the max
/// |z| did not increase over the last two grid points.  A finite battery can
/// only refute convergence in distribution, so a pass reads "consistent
/// with convergence".
LaplaceReport test_convergence_in_distribution(
    const std::function<RandomMeasureModel(long)>& seq,
    const RandomMeasureModel& target, const FunctionFamily& battery,
    const std::vector<long>& n_grid, long reps, uint64_t seed,
    double z_threshold = 3.0);

RandomMeasureModel model_from_json(const nlohmann::json& j);
nlohmann::json laplace_report_to_json(const LaplaceReport& r);
std::string laplace_report_csv(const LaplaceReport& r);

}  // namespace vague
