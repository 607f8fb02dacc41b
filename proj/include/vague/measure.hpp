#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/space.hpp"

namespace vague {

class TestFunction;

struct Atom {
  Point point;
  double weight;  // > 0
};

/// Finite list of positive-weight atoms on a ground space.  Atoms at
/// identical coordinates are merged at construction; the atom list is kept
/// sorted lexicographically, so equal measures compare equal.
class DiscreteMeasure {
 public:
  DiscreteMeasure(GroundSpace space, std::vector<Atom> atoms);

  static DiscreteMeasure zero(GroundSpace space) {
    return DiscreteMeasure(std::move(space), {});
  }
  static DiscreteMeasure dirac(GroundSpace space, Point x, double w = 1.0) {
    return DiscreteMeasure(std::move(space), {{std::move(x), w}});
  }

  const GroundSpace& space() const { return space_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_mass_; }

  DiscreteMeasure restrict(const Region& B) const;
  double integrate(const TestFunction& f) const;
  double mass(const Region& B) const;
  double boundary_mass(const Region& B) const;

  /// True iff every atom weight is a positive integer (point measure with
  /// multiplicity).
  bool is_point_measure(double tol = 1e-9) const;

  bool operator==(const DiscreteMeasure& o) const;

  friend DiscreteMeasure add(const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu);
  friend DiscreteMeasure scale(const DiscreteMeasure& mu, double c);

 private:
  GroundSpace space_;
  std::vector<Atom> atoms_;
  double total_mass_ = 0;
};

DiscreteMeasure add(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
DiscreteMeasure scale(const DiscreteMeasure& mu, double c);

/// Level-indexed family of finite restrictions to K_m, materialized lazily
/// from a pure generator.  The cache fill is idempotent and safe under
/// concurrent materialization.
class LocallyFiniteMeasure {
 public:
  using Generator = std::function<DiscreteMeasure(int)>;

  LocallyFiniteMeasure(GroundSpace space, Generator gen);

  /// A finite measure viewed as locally finite (level m is the restriction
  /// to K_m).
  static LocallyFiniteMeasure from_finite(const DiscreteMeasure& mu);

  const GroundSpace& space() const { return space_; }

  /// The restriction to K_m.  Generators must return measures supported in
  /// K_m; this is checked on materialization.
  DiscreteMeasure level(int m) const;

  int max_materialized() const;

 private:
  GroundSpace space_;
  Generator gen_;
  struct Cache {
    std::mutex mu;
    std::map<int, DiscreteMeasure> levels;
  };
  std::shared_ptr<Cache> cache_;
};

/// T_m: reweights the level-(m+1) restriction by the bump g_m; the result is
/// a finite measure supported in K_{m+1}.
DiscreteMeasure truncate(const LocallyFiniteMeasure& mu, int m);

nlohmann::json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

}  // namespace vague
