#include "vague/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vague {

using json = nlohmann::json;

namespace {

constexpr size_t kMatchCap = 4096;
constexpr double kDistSlack = 1e-12;

std::string region_label(const Region& B) { return region_to_json(B).dump(); }

void require_grid(const std::vector<long>& n_grid) {
  if (n_grid.empty()) throw SchemaError("n_grid must be nonempty");
  for (size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw SchemaError("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw SchemaError("n_grid must be strictly increasing");
  }
}

/// Tri-state rule shared by the checkers.  A probe passes when its final gap
/// is <= tol and the tail of the gap trace is settling (previous gap already
/// below tol, or the last step did not increase, or there is only one grid
/// point).  Any gap >= 10*tol at the largest n, or a structural mismatch,
/// fails the probe outright.  Monotone in tol by construction.
TriState assess(const std::vector<ProbeTrace>& probes, double tol) {
  bool all_pass = !probes.empty();
  bool any_fail = false;
  for (const ProbeTrace& p : probes) {
    if (p.hard_fail) {
      any_fail = true;
      all_pass = false;
      continue;
    }
    if (p.gaps.empty()) continue;
    double last = p.gaps.back();
    if (std::isinf(last) || last >= 10 * tol) any_fail = true;
    if (!(last <= tol)) {
      all_pass = false;
      continue;
    }
    if (p.gaps.size() >= 2) {
      double prev = p.gaps[p.gaps.size() - 2];
      bool settling = prev <= tol || last <= prev * (1 + 1e-9) + 1e-15;
      if (!settling) all_pass = false;
    }
  }
  if (any_fail) return TriState::Fail;
  return all_pass ? TriState::Pass : TriState::Inconclusive;
}

Verdict finish(std::vector<ProbeTrace> probes,
               std::vector<std::string> excluded, double tol) {
  Verdict v;
  v.tol = tol;
  v.probes = std::move(probes);
  v.excluded_probes = std::move(excluded);
  v.converged = assess(v.probes, tol);
  return v;
}

std::vector<Point> expand_atoms(const DiscreteMeasure& mu) {
  std::vector<Point> out;
  for (const Atom& a : mu.atoms()) {
    long mult = std::lround(a.weight);
    for (long i = 0; i < mult; ++i) out.push_back(a.point);
  }
  return out;
}

/// Kuhn's augmenting-path matching on the threshold graph; left nodes are
/// scanned in index order so ties break deterministically.
bool perfect_matching(const std::vector<std::vector<double>>& d, double thr,
                      std::vector<int>* left_match) {
  size_t k = d.size();
  std::vector<int> matchL(k, -1), matchR(k, -1);
  std::vector<bool> vis(k, false);
  std::function<bool(size_t)> aug = [&](size_t i) {
    for (size_t j = 0; j < k; ++j) {
      if (vis[j] || d[i][j] > thr + kDistSlack) continue;
      vis[j] = true;
      if (matchR[j] < 0 || aug(static_cast<size_t>(matchR[j]))) {
        matchR[j] = static_cast<int>(i);
        matchL[i] = static_cast<int>(j);
        return true;
      }
    }
    return false;
  };
  for (size_t i = 0; i < k; ++i) {
    std::fill(vis.begin(), vis.end(), false);
    if (!aug(i)) return false;
  }
  if (left_match) *left_match = matchL;
  return true;
}

}  // namespace

const char* tri_state_name(TriState s) {
  switch (s) {
    case TriState::Pass:
      return "pass";
    case TriState::Fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

Verdict check_vague_functions(const MeasureSequence& seq,
                              const FunctionFamily& battery,
                              const std::vector<long>& n_grid, double tol) {
  require_grid(n_grid);
  if (battery.members.empty()) throw SchemaError("empty function battery");
  std::vector<ProbeTrace> probes;
  for (size_t i = 0; i < battery.members.size(); ++i) {
    const TestFunction& f = battery.members[i];
    if (!(f.space() == seq.space))
      throw SpaceMismatchError("battery member lives on a different space");
    int L = f.support_level();
    double limit_val = seq.limit.level(L).integrate(f);
    ProbeTrace p;
    p.probe_id = "f" + std::to_string(i) + " " + f.describe();
    for (long n : n_grid) {
      double v = seq.generator(n).level(L).integrate(f);
      p.n_values.push_back(n);
      p.values.push_back(v);
      p.limit_vals.push_back(limit_val);
      p.gaps.push_back(std::fabs(v - limit_val));
    }
    probes.push_back(std::move(p));
  }
  return finish(std::move(probes), {}, tol);
}

Verdict check_portmanteau(const MeasureSequence& seq,
                          const std::vector<Region>& regions,
                          const std::vector<long>& n_grid, double tol) {
  require_grid(n_grid);
  if (regions.empty()) throw SchemaError("no probe regions given");
  std::vector<ProbeTrace> probes;
  std::vector<std::string> excluded;
  for (const Region& B : regions) {
    BoundednessWitness w = is_bounded(seq.space, B);
    if (!w.bounded)
      throw SchemaError("portmanteau probe region is unbounded: " +
                        region_label(B));
    int L = w.level + 1;  // the closure of B still sits inside K_{w+1}
    double bd = seq.limit.level(L).boundary_mass(B);
    if (bd > 0) {
      excluded.push_back(region_label(B) + " (limit boundary mass " +
                         std::to_string(bd) + ")");
      continue;
    }
    double limit_val = seq.limit.level(L).mass(B);
    ProbeTrace p;
    p.probe_id = "B " + region_label(B);
    for (long n : n_grid) {
      double v = seq.generator(n).level(L).mass(B);
      p.n_values.push_back(n);
      p.values.push_back(v);
      p.limit_vals.push_back(limit_val);
      p.gaps.push_back(std::fabs(v - limit_val));
    }
    probes.push_back(std::move(p));
  }
  if (probes.empty() && excluded.empty())
    throw SchemaError("no probe regions given");
  Verdict v = finish(std::move(probes), std::move(excluded), tol);
  if (v.probes.empty()) v.converged = TriState::Inconclusive;
  return v;
}

Matching match_points(const DiscreteMeasure& mu_n, const DiscreteMeasure& mu,
                      const Region& B) {
  if (!(mu_n.space() == mu.space()))
    throw SpaceMismatchError("measures live on different spaces");
  if (mu.boundary_mass(B) > 0)
    throw SchemaError("limit charges the boundary of the matching region");
  DiscreteMeasure a = mu_n.restrict(B);
  DiscreteMeasure b = mu.restrict(B);
  if (!a.is_point_measure() || !b.is_point_measure())
    throw SchemaError("point matching requires integer atom weights");
  std::vector<Point> left = expand_atoms(a);
  std::vector<Point> right = expand_atoms(b);
  if (left.size() != right.size())
    throw CountMismatchError("point counts differ on region " +
                             region_label(B) + ": " +
                             std::to_string(left.size()) + " vs " +
                             std::to_string(right.size()));
  Matching out{B, left.size(), {}, 0.0};
  if (left.empty()) return out;
  if (left.size() > kMatchCap)
    throw SizeCapError("too many points for bottleneck matching");
  size_t k = left.size();
  std::vector<std::vector<double>> d(k, std::vector<double>(k));
  std::vector<double> levels;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) {
      d[i][j] = mu_n.space().hu_dist(left[i], right[j]);
      levels.push_back(d[i][j]);
    }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  // smallest threshold admitting a perfect matching (binary search over the
  // finite set of pairwise distances)
  size_t lo = 0, hi = levels.size() - 1;
  if (!perfect_matching(d, levels[hi], nullptr))
    throw CountMismatchError("bottleneck matching infeasible");  // unreachable
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (perfect_matching(d, levels[mid], nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  std::vector<int> matchL;
  perfect_matching(d, levels[lo], &matchL);
  for (size_t i = 0; i < k; ++i) {
    out.pairs.emplace_back(left[i], right[static_cast<size_t>(matchL[i])]);
    out.max_displacement =
        std::max(out.max_displacement, d[i][static_cast<size_t>(matchL[i])]);
  }
  return out;
}

Verdict check_point_matching(const MeasureSequence& seq,
                             const std::vector<Region>& regions,
                             const std::vector<long>& n_grid, double tol) {
  require_grid(n_grid);
  if (regions.empty()) throw SchemaError("no probe regions given");
  std::vector<ProbeTrace> probes;
  std::vector<std::string> excluded;
  for (const Region& B : regions) {
    BoundednessWitness w = is_bounded(seq.space, B);
    if (!w.bounded)
      throw SchemaError("matching region is unbounded: " + region_label(B));
    int L = w.level + 1;
    DiscreteMeasure limit_part = seq.limit.level(L);
    if (limit_part.boundary_mass(B) > 0) {
      excluded.push_back(region_label(B) + " (limit boundary mass)");
      continue;
    }
    ProbeTrace p;
    p.probe_id = "match " + region_label(B);
    for (long n : n_grid) {
      DiscreteMeasure part = seq.generator(n).level(L);
      p.n_values.push_back(n);
      try {
        Matching m = match_points(part, limit_part, B);
        p.values.push_back(m.max_displacement);
        p.limit_vals.push_back(0.0);
        p.gaps.push_back(m.max_displacement);
      } catch (const CountMismatchError& e) {
        p.values.push_back(kInf);
        p.limit_vals.push_back(0.0);
        p.gaps.push_back(kInf);
        p.note = e.what();
        if (n == n_grid.back()) p.hard_fail = true;
      }
    }
    probes.push_back(std::move(p));
  }
  Verdict v = finish(std::move(probes), std::move(excluded), tol);
  if (v.probes.empty()) v.converged = TriState::Inconclusive;
  return v;
}

Verdict check_vague_metric(const MeasureSequence& seq,
                           const std::vector<long>& n_grid, double tol) {
  require_grid(n_grid);
  ProbeTrace p;
  p.probe_id = "rho_tilde";
  double err = 0;
  for (long n : n_grid) {
    VagueDistance vd = vague_dist(seq.generator(n), seq.limit, tol / 2);
    err = vd.error_bound;
    p.n_values.push_back(n);
    p.values.push_back(vd.value);
    p.limit_vals.push_back(0.0);
    p.gaps.push_back(vd.value);
  }
  p.note = "series truncation error <= " + std::to_string(err);
  return finish({std::move(p)}, {}, tol);
}

CrossValidationReport cross_validate(const MeasureSequence& seq,
                                     const FunctionFamily& battery,
                                     const std::vector<Region>& regions,
                                     const std::vector<long>& n_grid,
                                     double tol) {
  require_grid(n_grid);
  CrossValidationReport r;
  r.checker_verdicts.emplace_back(
      "functions", check_vague_functions(seq, battery, n_grid, tol));
  r.checker_verdicts.emplace_back(
      "portmanteau", check_portmanteau(seq, regions, n_grid, tol));
  // the point matcher only applies to point measures (integer multiplicities)
  int L = 2;
  for (const Region& B : regions) {
    BoundednessWitness w = is_bounded(seq.space, B);
    if (w.bounded) L = std::max(L, w.level + 1);
  }
  bool applicable = seq.limit.level(L).is_point_measure() &&
                    seq.generator(n_grid.front()).level(L).is_point_measure() &&
                    seq.generator(n_grid.back()).level(L).is_point_measure();
  if (applicable)
    r.checker_verdicts.emplace_back(
        "point_matching", check_point_matching(seq, regions, n_grid, tol));
  else
    r.skipped_checkers.push_back(
        "point_matching (non-integer atom weights)");
  r.checker_verdicts.emplace_back("metric",
                                  check_vague_metric(seq, n_grid, tol));

  bool any_fail = false, all_pass = true;
  r.agreement = true;
  for (size_t i = 0; i < r.checker_verdicts.size(); ++i) {
    TriState s = r.checker_verdicts[i].second.converged;
    if (s != r.checker_verdicts[0].second.converged) r.agreement = false;
    if (s == TriState::Fail) any_fail = true;
    if (s != TriState::Pass) all_pass = false;
  }
  r.consensus = any_fail ? TriState::Fail
                         : (all_pass ? TriState::Pass : TriState::Inconclusive);
  return r;
}

namespace {

MeasureSequence finite_seq(const GroundSpace& sp, const std::string& label,
                           std::function<DiscreteMeasure(long)> fin,
                           const DiscreteMeasure& limit) {
  return MeasureSequence{
      sp,
      [fin = std::move(fin)](long n) {
        return LocallyFiniteMeasure::from_finite(fin(n));
      },
      LocallyFiniteMeasure::from_finite(limit), label};
}

/// Integer lattice with per-site displacements 4^{-|j|}/n; the damping keeps
/// the truncation metric rho_tilde within O(1/n) uniformly over levels.
LocallyFiniteMeasure lattice_measure(const GroundSpace& sp, long n) {
  return LocallyFiniteMeasure(sp, [sp, n](int m) {
    std::vector<Atom> atoms;
    for (long j = -(m + 2); j <= m + 2; ++j) {
      double shift =
          n > 0 ? std::ldexp(1.0, -2 * static_cast<int>(std::min<long>(
                                          std::labs(j), 30))) / double(n)
                : 0.0;
      double pos = double(j) + shift;
      if (std::fabs(pos) < m) atoms.push_back({Point{{pos}}, 1.0});
    }
    return DiscreteMeasure(sp, std::move(atoms));
  });
}

}  // namespace

MeasureSequence catalogue_sequence(const std::string& name) {
  GroundSpace e1 = GroundSpace::euclidean(1);
  GroundSpace hl = GroundSpace::halfline_hl();
  GroundSpace w1 = GroundSpace::weak(1);
  if (name == "delta_shift")
    return finite_seq(
        e1, name,
        [e1](long n) { return DiscreteMeasure::dirac(e1, {1.0 + 1.0 / n}); },
        DiscreteMeasure::dirac(e1, {1.0}));
  if (name == "vanishing_hl")
    return finite_seq(
        hl, name,
        [hl](long n) { return DiscreteMeasure::dirac(hl, {1.0 / n}); },
        DiscreteMeasure::zero(hl));
  if (name == "mass_fade")
    return finite_seq(
        e1, name,
        [e1](long n) {
          double w = 1.0 - 1.0 / n;
          return w > 0 ? DiscreteMeasure::dirac(e1, {1.0}, w)
                       : DiscreteMeasure::zero(e1);
        },
        DiscreteMeasure::dirac(e1, {1.0}));
  if (name == "lattice")
    return MeasureSequence{
        e1, [e1](long n) { return lattice_measure(e1, n); },
        lattice_measure(e1, 0), name};
  if (name == "escape")
    return finite_seq(
        e1, name,
        [e1](long n) { return DiscreteMeasure::dirac(e1, {double(n)}); },
        DiscreteMeasure::dirac(e1, {0.0}));
  if (name == "wrong_limit")
    return finite_seq(
        e1, name,
        [e1](long n) { return DiscreteMeasure::dirac(e1, {1.0 / n}); },
        DiscreteMeasure::dirac(e1, {1.0}));
  if (name == "oscillate")
    return finite_seq(
        e1, name,
        [e1](long n) {
          return DiscreteMeasure::dirac(e1, {n % 2 == 0 ? 1.0 : -1.0});
        },
        DiscreteMeasure::dirac(e1, {-1.0}));
  if (name == "mass_blowup")
    return finite_seq(
        e1, name,
        [e1](long n) { return DiscreteMeasure::dirac(e1, {1.0}, double(n)); },
        DiscreteMeasure::dirac(e1, {1.0}));
  if (name == "vanishing_weak")
    return finite_seq(
        w1, name,
        [w1](long n) { return DiscreteMeasure::dirac(w1, {1.0 / n}); },
        DiscreteMeasure::dirac(w1, {0.0}));
  throw SchemaError("unknown catalogue sequence: " + name);
}

std::vector<std::string> catalogue_names() {
  return {"delta_shift", "vanishing_hl", "mass_fade",
          "lattice",     "escape",       "wrong_limit",
          "oscillate",   "mass_blowup",  "vanishing_weak"};
}

std::vector<Region> default_probe_regions(const MeasureSequence& seq) {
  switch (seq.space.kind()) {
    case SpaceKind::Euclidean:
      if (seq.space.dim() == 1)
        return {Region::interval(0.5, 1.5), Region::interval(-1.5, -0.5),
                Region::interval(-0.25, 0.25), Region::interval(-4.5, 4.5)};
      return {Region::ball(Point{std::vector<double>(seq.space.dim(), 0.0)},
                           0.75),
              Region::ball(Point{std::vector<double>(seq.space.dim(), 0.0)},
                           4.5)};
    case SpaceKind::Weak:
      if (seq.space.dim() == 1)
        return {Region::interval(-0.5, 0.5), Region::interval(0.25, 2.0),
                Region::whole_space()};
      return {Region::ball(Point{std::vector<double>(seq.space.dim(), 0.0)},
                           0.75),
              Region::whole_space()};
    case SpaceKind::Punctured:
    case SpaceKind::HalflineHL:
      return {Region::annulus(0.5, 2.0), Region::annulus(0.25, 4.0),
              Region::annulus(1.0, 3.0)};
  }
  throw SchemaError("unknown space kind");
}

FunctionFamily default_battery(const MeasureSequence& seq, int extra_count,
                               uint64_t seed) {
  FunctionFamily fam;
  for (const Region& B : default_probe_regions(seq)) {
    fam.members.push_back(TestFunction::lower_approx(seq.space, B, 4));
    fam.members.push_back(TestFunction::upper_approx(seq.space, B, 4));
  }
  if (extra_count > 0) {
    FunctionFamily extra = lipschitz_battery(seq.space, extra_count, seed);
    fam.members.insert(fam.members.end(), extra.members.begin(),
                       extra.members.end());
  }
  return fam;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["converged"] = tri_state_name(v.converged);
  j["tol"] = v.tol;
  j["excluded_probes"] = v.excluded_probes;
  j["probes"] = json::array();
  for (const ProbeTrace& p : v.probes) {
    json pj;
    pj["id"] = p.probe_id;
    pj["n"] = p.n_values;
    pj["values"] = p.values;
    pj["limit"] = p.limit_vals;
    pj["gaps"] = p.gaps;
    pj["hard_fail"] = p.hard_fail;
    if (!p.note.empty()) pj["note"] = p.note;
    j["probes"].push_back(std::move(pj));
  }
  return j;
}

json report_to_json(const CrossValidationReport& r) {
  json j;
  j["checkers"] = json::object();
  for (const auto& [name, verdict] : r.checker_verdicts)
    j["checkers"][name] = verdict_to_json(verdict);
  j["skipped_checkers"] = r.skipped_checkers;
  j["agreement"] = r.agreement;
  j["consensus"] = tri_state_name(r.consensus);
  return j;
}

std::string gap_table_csv(const Verdict& v) {
  std::ostringstream out;
  out << "probe_id,n,value,limit,gap\n";
  out.precision(17);
  for (const ProbeTrace& p : v.probes) {
    std::string id = p.probe_id;
    std::replace(id.begin(), id.end(), ',', ';');
    for (size_t i = 0; i < p.n_values.size(); ++i)
      out << '"' << id << "\"," << p.n_values[i] << ',' << p.values[i] << ','
          << p.limit_vals[i] << ',' << p.gaps[i] << '\n';
  }
  return out.str();
}

}  // namespace vague
