#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/measure.hpp"
#include "vague/metrics.hpp"
#include "vague/test_function.hpp"

namespace vague {

/// A deterministic sequence of measures with its claimed limit.  The
/// generator must be pure: the same n always yields the same measure.
struct MeasureSequence {
  GroundSpace space;
  std::function<LocallyFiniteMeasure(long)> generator;
  LocallyFiniteMeasure limit;
  std::string label;
};

enum class TriState { Pass, Fail, Inconclusive };

const char* tri_state_name(TriState s);

struct ProbeTrace {
  std::string probe_id;
  std::vector<long> n_values;
  std::vector<double> values;      // mu_n probe value
  std::vector<double> limit_vals;  // mu probe value (constant per probe)
  std::vector<double> gaps;
  bool hard_fail = false;  // e.g. point-count mismatch
  std::string note;
};

/// Tri-state diagnostic.  Pass: every probe's final gap <= tol and the gap
/// trace is eventually monotone-or-below-tol.  Fail: some probe's gap is
/// >= 10*tol at the largest n (or a structural mismatch occurred).
struct Verdict {
  TriState converged = TriState::Inconclusive;
  std::vector<ProbeTrace> probes;
  std::vector<std::string> excluded_probes;  // e.g. boundary-mass regions
  double tol = 0;
};

/// Min-max (bottleneck) bijection between the atoms of two equal-count
/// point-measure restrictions.
struct Matching {
  Region region;
  size_t count = 0;
  std::vector<std::pair<Point, Point>> pairs;  // (mu_n atom, mu atom)
  double max_displacement = 0;                 // Hu metric
};

Verdict check_vague_functions(const MeasureSequence& seq,
                              const FunctionFamily& battery,
                              const std::vector<long>& n_grid, double tol);

Verdict check_portmanteau(const MeasureSequence& seq,
                          const std::vector<Region>& regions,
                          const std::vector<long>& n_grid, double tol);

/// Bottleneck matching of mu_n|_B onto mu|_B, multiplicities expanded.
/// Throws CountMismatchError when the restrictions have different counts and
/// SchemaError when mu charges the boundary of B.
Matching match_points(const DiscreteMeasure& mu_n, const DiscreteMeasure& mu,
                      const Region& B);

/// Point-matching convergence check over a list of regions.
Verdict check_point_matching(const MeasureSequence& seq,
                             const std::vector<Region>& regions,
                             const std::vector<long>& n_grid, double tol);

Verdict check_vague_metric(const MeasureSequence& seq,
                           const std::vector<long>& n_grid, double tol);

struct CrossValidationReport {
  std::vector<std::pair<std::string, Verdict>> checker_verdicts;
  std::vector<std::string> skipped_checkers;
  bool agreement = true;  // all applicable checkers share one tri-state
  TriState consensus = TriState::Inconclusive;
};

/// Runs all applicable checkers; a disagreement among them is flagged as a
/// defect, since the underlying convergence criteria are equivalent.
CrossValidationReport cross_validate(const MeasureSequence& seq,
                                     const FunctionFamily& battery,
                                     const std::vector<Region>& regions,
                                     const std::vector<long>& n_grid,
                                     double tol);

/// Built-in sequence catalogue (delta_shift, vanishing_hl, mass_fade,
/// lattice, escape, wrong_limit, oscillate, mass_blowup, vanishing_weak).
MeasureSequence catalogue_sequence(const std::string& name);
std::vector<std::string> catalogue_names();
/// Probe regions with mu(boundary) = 0 suited to a catalogue entry's space.
std::vector<Region> default_probe_regions(const MeasureSequence& seq);

/// Deterministic battery for a sequence: upper/lower approximants of the
/// default probe regions plus seeded extras.
FunctionFamily default_battery(const MeasureSequence& seq, int extra_count,
                               uint64_t seed);

nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json report_to_json(const CrossValidationReport& r);
std::string gap_table_csv(const Verdict& v);

}  // namespace vague
