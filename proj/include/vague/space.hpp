#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/errors.hpp"

namespace vague {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of the ground space; coords has length k (1 for the halfline).
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  double norm() const;  // Euclidean distance to the ambient origin
  bool operator==(const Point& o) const { return coords == o.coords; }
  bool operator<(const Point& o) const { return coords < o.coords; }
};

double base_distance(const Point& x, const Point& y);

enum class SpaceKind { Euclidean, Weak, Punctured, HalflineHL };

enum class MetricChoice { Base, Hu };

/// Which metric generated a K_m catalogue; see localizing_set().
/// Ground space catalogue: Euclidean R^k (Radon boundedness, K_m = open ball
/// of radius m), weak R^k (K_m = X), punctured R^k \ {0} (bounded away from
/// the origin), and the halfline (0, inf) (bounded away from 0).
class GroundSpace {
 public:
  GroundSpace(SpaceKind kind, int dim, bool radial_cap = false);

  static GroundSpace euclidean(int dim) { return {SpaceKind::Euclidean, dim}; }
  static GroundSpace weak(int dim) { return {SpaceKind::Weak, dim}; }
  static GroundSpace punctured(int dim, bool cap = false) {
    return {SpaceKind::Punctured, dim, cap};
  }
  static GroundSpace halfline_hl() { return {SpaceKind::HalflineHL, 1}; }

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool radial_cap() const { return radial_cap_; }
  bool has_forbidden_set() const {
    return kind_ == SpaceKind::Punctured || kind_ == SpaceKind::HalflineHL;
  }

  /// Membership in X (e.g. strictly positive on the halfline).
  bool contains(const Point& x) const;
  void require_member(const Point& x) const;

  /// d'(x, C); +inf for kinds without a forbidden set.
  double forbidden_dist(const Point& x) const;

  /// The metric generating the boundedness: the Hu construction
  /// max(d' ^ 1, |1/d'(x,C) - 1/d'(y,C)|) for kinds with C, plain d' for
  /// euclidean, d' ^ 1 for weak.
  double hu_dist(const Point& x, const Point& y) const;

  double dist(const Point& x, const Point& y, MetricChoice c) const {
    return c == MetricChoice::Hu ? hu_dist(x, y) : base_distance(x, y);
  }

  /// Piecewise-linear bump g_m with 1_{cl(K_m)} <= g_m <= 1_{K_{m+1}}.
  double bump(int m, const Point& x) const;

  bool operator==(const GroundSpace& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && radial_cap_ == o.radial_cap_;
  }

  std::string describe() const;

 private:
  SpaceKind kind_;
  int dim_;
  bool radial_cap_;
};

// ---------------------------------------------------------------------------
// Region catalogue.  Every entry supports exact membership, boundary and
// interior tests, base-metric distance and (where noted) Hu-metric distance.

struct IntervalRegion {
  double lo = 0, hi = 0;
  bool lo_open = false, hi_open = false;  // hi may be +inf (then hi_open)
};

struct BallRegion {
  Point center;
  double radius = 0;
  bool open = false;
};

struct BoxRegion {
  std::vector<double> lo, hi;  // closed box
};

/// {x : lo < d'(x,C) <= hi} for kinds with C; radius measured from the
/// origin otherwise.  hi may be +inf.
struct AnnulusRegion {
  double lo = 0, hi = 0;
  bool hi_open = false;
};

struct WholeSpaceRegion {};

class Region;

struct UnionRegion {
  std::vector<Region> parts;
};

class Region {
 public:
  using Node = std::variant<IntervalRegion, BallRegion, BoxRegion,
                            AnnulusRegion, WholeSpaceRegion, UnionRegion>;

  Region(IntervalRegion r) : node_(std::make_shared<Node>(std::move(r))) {}
  Region(BallRegion r) : node_(std::make_shared<Node>(std::move(r))) {}
  Region(BoxRegion r) : node_(std::make_shared<Node>(std::move(r))) {}
  Region(AnnulusRegion r) : node_(std::make_shared<Node>(std::move(r))) {}
  Region(WholeSpaceRegion r) : node_(std::make_shared<Node>(r)) {}
  Region(UnionRegion r) : node_(std::make_shared<Node>(std::move(r))) {}

  static Region interval(double lo, double hi, bool lo_open = false,
                         bool hi_open = false) {
    return Region(IntervalRegion{lo, hi, lo_open, hi_open});
  }
  static Region ball(Point center, double radius, bool open = false) {
    return Region(BallRegion{std::move(center), radius, open});
  }
  static Region box(std::vector<double> lo, std::vector<double> hi) {
    return Region(BoxRegion{std::move(lo), std::move(hi)});
  }
  static Region annulus(double lo, double hi, bool hi_open = false) {
    return Region(AnnulusRegion{lo, hi, hi_open});
  }
  static Region whole_space() { return Region(WholeSpaceRegion{}); }
  static Region union_of(std::vector<Region> parts) {
    return Region(UnionRegion{std::move(parts)});
  }

  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

bool region_contains(const GroundSpace& space, const Region& B, const Point& x);
bool region_in_closure(const GroundSpace& space, const Region& B,
                       const Point& x);
bool region_in_interior(const GroundSpace& space, const Region& B,
                        const Point& x);
/// Topological boundary test.  For unions this is exact whenever the parts'
/// closures meet only where some part interior covers the overlap; catalogue
/// unions with touching closed parts may over-report boundary points.
bool region_on_boundary(const GroundSpace& space, const Region& B,
                        const Point& x);

/// d'-nearest point of the closure of B; errors on an empty region.
Point region_project(const GroundSpace& space, const Region& B,
                     const Point& x);

/// inf_{y in B} of the chosen metric.  Exact closed form; Hu distance on
/// punctured(k >= 2) is restricted to radially symmetric regions.
double region_distance(const GroundSpace& space, const Point& x,
                       const Region& B, MetricChoice metric);

/// Distance from x to the complement of the interior of B (the "depth"
/// inside B), base metric.  Zero outside the interior.
double region_interior_depth(const GroundSpace& space, const Point& x,
                             const Region& B, MetricChoice metric);

struct BoundednessWitness {
  bool bounded = false;
  int level = 0;  // smallest m with B contained in K_m, when bounded
};

/// Membership of B in the boundedness: smallest m with B subset of K_m.
BoundednessWitness is_bounded(const GroundSpace& space, const Region& B);

/// The catalogue region equal to K_m.
Region localizing_set(const GroundSpace& space, int m);

/// Closed-form sup over B of d'(., origin) and inf over B of d'(., C),
/// together with attainment flags; used by is_bounded and the approximant
/// support computations.
struct RegionExtremes {
  double sup_norm = -kInf;  // sup over closure of d'(., 0)
  bool sup_attained = false;
  double inf_forbidden = kInf;  // inf over closure of d'(., C)
  bool inf_attained = false;
  bool empty = true;
};
RegionExtremes region_extremes(const GroundSpace& space, const Region& B);

// JSON serialization per the external interface schemas.
nlohmann::json space_to_json(const GroundSpace& space);
GroundSpace space_from_json(const nlohmann::json& j);
nlohmann::json region_to_json(const Region& B);
Region region_from_json(const nlohmann::json& j);

namespace testing {
/// Fault-injection hook: when set, bump() leaks outside K_{m+1}.  Used by
/// the self-test to demonstrate that the invariant suite catches a broken
/// sandwich.
extern bool bump_fault;
}  // namespace testing

}  // namespace vague
