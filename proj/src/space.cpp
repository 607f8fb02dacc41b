#include "vague/space.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vague {

namespace testing {
bool bump_fault = false;
}

using json = nlohmann::json;

double Point::norm() const {
  double s = 0;
  for (double c : coords) s += c * c;
  return std::sqrt(s);
}

double base_distance(const Point& x, const Point& y) {
  if (x.coords.size() != y.coords.size())
    throw SpaceMismatchError("points of different dimension");
  double s = 0;
  for (size_t i = 0; i < x.coords.size(); ++i) {
    double d = x.coords[i] - y.coords[i];
    s += d * d;
  }
  return std::sqrt(s);
}

GroundSpace::GroundSpace(SpaceKind kind, int dim, bool radial_cap)
    : kind_(kind), dim_(dim), radial_cap_(radial_cap) {
  if (dim < 1) throw SchemaError("space dimension must be >= 1");
  if (kind == SpaceKind::HalflineHL && dim != 1)
    throw SchemaError("halfline_hl is one-dimensional");
  if (kind != SpaceKind::Punctured && radial_cap)
    throw SchemaError("radial cap applies to punctured spaces only");
}

bool GroundSpace::contains(const Point& x) const {
  if (static_cast<int>(x.coords.size()) != dim_) return false;
  switch (kind_) {
    case SpaceKind::Euclidean:
    case SpaceKind::Weak:
      return true;
    case SpaceKind::Punctured:
      return x.norm() > 0;
    case SpaceKind::HalflineHL:
      return x.coords[0] > 0;
  }
  return false;
}

void GroundSpace::require_member(const Point& x) const {
  if (!contains(x))
    throw SchemaError("point outside the ground space " + describe());
}

double GroundSpace::forbidden_dist(const Point& x) const {
  switch (kind_) {
    case SpaceKind::Punctured:
      return x.norm();
    case SpaceKind::HalflineHL:
      return x.coords[0];
    default:
      return kInf;
  }
}

double GroundSpace::hu_dist(const Point& x, const Point& y) const {
  double d = base_distance(x, y);
  switch (kind_) {
    case SpaceKind::Euclidean:
      return d;
    case SpaceKind::Weak:
      return std::min(d, 1.0);
    default: {
      double inv_x = 1.0 / forbidden_dist(x);
      double inv_y = 1.0 / forbidden_dist(y);
      return std::max(std::min(d, 1.0), std::fabs(inv_x - inv_y));
    }
  }
}

namespace {

double clamp(double v, double lo, double hi) {
  return std::max(lo, std::min(hi, v));
}

double radial_bump(int m, double t) {
  // t = 1 / d'(x, C); linear in t between m and m+1
  return clamp(double(m) + 1.0 - t, 0.0, 1.0);
}

}  // namespace

double GroundSpace::bump(int m, const Point& x) const {
  if (m < 1) throw SchemaError("bump level must be >= 1");
  double v;
  switch (kind_) {
    case SpaceKind::Weak:
      v = 1.0;
      break;
    case SpaceKind::Euclidean:
      v = clamp(double(m) + 1.0 - x.norm(), 0.0, 1.0);
      break;
    case SpaceKind::HalflineHL:
      v = radial_bump(m, 1.0 / forbidden_dist(x));
      break;
    case SpaceKind::Punctured:
      v = radial_bump(m, 1.0 / forbidden_dist(x));
      if (radial_cap_)
        v = std::min(v, clamp(double(m) + 1.0 - x.norm(), 0.0, 1.0));
      break;
    default:
      v = 0.0;
  }
  if (testing::bump_fault) v = std::max(v, 0.5);
  return v;
}

std::string GroundSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::Euclidean:
      os << "euclidean(" << dim_ << ")";
      break;
    case SpaceKind::Weak:
      os << "weak(" << dim_ << ")";
      break;
    case SpaceKind::Punctured:
      os << "punctured(" << dim_ << (radial_cap_ ? ",cap" : "") << ")";
      break;
    case SpaceKind::HalflineHL:
      os << "halfline_hl";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Region machinery

namespace {

bool is_full_line(const GroundSpace& s) {
  return s.kind() != SpaceKind::HalflineHL;
}

/// Closed interval piece of the line; a may be -inf, b may be +inf.
struct Piece {
  double a, b;
};

bool piece_nonempty(const Piece& p) { return p.a <= p.b; }

void collect_closure_pieces(const GroundSpace& space, const Region& B,
                            std::vector<Piece>& out) {
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          out.push_back({r.lo, r.hi});
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          out.push_back({r.center.coords[0] - r.radius,
                         r.center.coords[0] + r.radius});
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          out.push_back({r.lo[0], r.hi[0]});
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          out.push_back({r.lo, r.hi});
          if (is_full_line(space)) out.push_back({-r.hi, -r.lo});
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          if (space.kind() == SpaceKind::HalflineHL)
            out.push_back({0, kInf});
          else
            out.push_back({-kInf, kInf});
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            collect_closure_pieces(space, part, out);
        }
      },
      B.node());
}

std::vector<Piece> merged_closure_pieces(const GroundSpace& space,
                                         const Region& B) {
  std::vector<Piece> ps;
  collect_closure_pieces(space, B, ps);
  ps.erase(std::remove_if(ps.begin(), ps.end(),
                          [](const Piece& p) { return !piece_nonempty(p); }),
           ps.end());
  std::sort(ps.begin(), ps.end(),
            [](const Piece& l, const Piece& r) { return l.a < r.a; });
  std::vector<Piece> merged;
  for (const auto& p : ps) {
    if (!merged.empty() && p.a <= merged.back().b)
      merged.back().b = std::max(merged.back().b, p.b);
    else
      merged.push_back(p);
  }
  if (space.kind() == SpaceKind::HalflineHL) {
    std::vector<Piece> clipped;
    for (auto& p : merged) {
      if (p.b <= 0) continue;
      clipped.push_back({std::max(p.a, 0.0), p.b});
    }
    merged = clipped;
  }
  return merged;
}

/// Open-interval pieces of the interior, merged (touching open intervals are
/// not merged: the touch point stays in the complement).
void collect_interior_pieces(const GroundSpace& space, const Region& B,
                             std::vector<Piece>& out) {
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          out.push_back({r.lo, r.hi});
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          out.push_back({r.center.coords[0] - r.radius,
                         r.center.coords[0] + r.radius});
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          out.push_back({r.lo[0], r.hi[0]});
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          out.push_back({r.lo, r.hi});
          if (is_full_line(space)) out.push_back({-r.hi, -r.lo});
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          out.push_back({-kInf, kInf});
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            collect_interior_pieces(space, part, out);
        }
      },
      B.node());
}

std::vector<Piece> merged_interior_pieces(const GroundSpace& space,
                                          const Region& B) {
  std::vector<Piece> ps;
  collect_interior_pieces(space, B, ps);
  ps.erase(std::remove_if(ps.begin(), ps.end(),
                          [](const Piece& p) { return p.a >= p.b; }),
           ps.end());
  std::sort(ps.begin(), ps.end(),
            [](const Piece& l, const Piece& r) { return l.a < r.a; });
  std::vector<Piece> merged;
  for (const auto& p : ps) {
    if (!merged.empty() && p.a < merged.back().b)
      merged.back().b = std::max(merged.back().b, p.b);
    else
      merged.push_back(p);
  }
  return merged;
}

/// Complement of the interior, as closed pieces (clipped to X).
std::vector<Piece> interior_complement_pieces(const GroundSpace& space,
                                              const Region& B) {
  auto in = merged_interior_pieces(space, B);
  std::vector<Piece> out;
  double cursor = (space.kind() == SpaceKind::HalflineHL) ? 0.0 : -kInf;
  for (const auto& p : in) {
    if (p.a >= cursor) out.push_back({cursor, p.a});
    cursor = p.b;
  }
  out.push_back({cursor, kInf});
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](const Piece& p) {
                             if (!piece_nonempty(p)) return true;
                             if (space.kind() == SpaceKind::HalflineHL &&
                                 p.b <= 0)
                               return true;  // only {0}, outside X
                             return false;
                           }),
            out.end());
  return out;
}

double base_dist_to_piece(double x, const Piece& p) {
  if (x < p.a) return p.a - x;
  if (x > p.b) return x - p.b;
  return 0;
}

/// Hu distance from |x| = x_abs (x on the given side) to the set of points
/// with radius s in [s_lo, s_hi] lying on the same or opposite side.
/// Exact: the objective max(min(d', 1), |1/x_abs - 1/s|) is piecewise
/// monotone in s with local minima only at the candidate points below.
double hu_inf_radial(double x_abs, bool same_side, double s_lo, double s_hi) {
  s_lo = std::max(s_lo, 0.0);
  if (s_lo > s_hi) return kInf;
  auto eval = [&](double s) {
    if (!(s > 0)) return kInf;
    double base = same_side ? std::fabs(x_abs - s) : x_abs + s;
    return std::max(std::min(base, 1.0), std::fabs(1.0 / x_abs - 1.0 / s));
  };
  if (same_side) {
    // both terms monotone away from s = x_abs
    return eval(clamp(x_abs, s_lo, s_hi));
  }
  std::vector<double> cands = {s_lo, std::min(s_hi, 1e18),
                               clamp(x_abs, s_lo, s_hi)};
  // crossing of rising d'-term with falling 1/s-term, uncapped branch:
  //   x_abs*s^2 + (x_abs^2+1)*s - x_abs = 0
  double A = x_abs, Bc = x_abs * x_abs + 1.0, C = -x_abs;
  double disc = Bc * Bc - 4 * A * C;
  if (disc >= 0 && A > 0) {
    double root = (-Bc + std::sqrt(disc)) / (2 * A);
    if (root > 0) cands.push_back(clamp(root, s_lo, s_hi));
  }
  // capped branch: 1/s - 1/x_abs = 1
  double s_cap = x_abs / (1.0 + x_abs);
  cands.push_back(clamp(s_cap, s_lo, s_hi));
  double best = kInf;
  for (double s : cands) best = std::min(best, eval(s));
  return best;
}

/// Hu distance from a 1-d point to a union of closed pieces, for the
/// halfline and punctured(1) kinds.
double hu_dist_pieces_1d(const GroundSpace& space, double x,
                         const std::vector<Piece>& pieces) {
  double x_abs = std::fabs(x);
  bool x_pos = x > 0;
  double best = kInf;
  for (const auto& p : pieces) {
    // positive side portion
    if (p.b > 0) {
      double lo = std::max(p.a, 0.0);
      best = std::min(best, hu_inf_radial(x_abs, x_pos, lo, p.b));
    }
    // negative side portion (punctured(1))
    if (p.a < 0 && space.kind() == SpaceKind::Punctured) {
      double hi = std::min(p.b, 0.0);
      best = std::min(best, hu_inf_radial(x_abs, !x_pos, -hi, -p.a));
    }
  }
  return best;
}

double base_dist_pieces_1d(double x, const std::vector<Piece>& pieces) {
  double best = kInf;
  for (const auto& p : pieces) best = std::min(best, base_dist_to_piece(x, p));
  return best;
}

/// Radius intervals occupied by a radially symmetric region; throws for
/// non-radial regions (used on punctured(k >= 2) only).
void collect_radial_pieces(const GroundSpace& space, const Region& B,
                           std::vector<Piece>& out) {
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AnnulusRegion>) {
          out.push_back({r.lo, r.hi});
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          if (r.center.norm() > 0)
            throw UnsupportedRegionError(
                "Hu distance on punctured(k>=2) requires radially symmetric "
                "regions (annuli, origin-centered balls)");
          out.push_back({0, r.radius});
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          out.push_back({0, kInf});
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            collect_radial_pieces(space, part, out);
        } else {
          throw UnsupportedRegionError(
              "Hu distance on punctured(k>=2) requires radially symmetric "
              "regions (annuli, origin-centered balls)");
        }
      },
      B.node());
}

double radial_of(const GroundSpace& space, const Point& x) {
  return space.has_forbidden_set() ? space.forbidden_dist(x) : x.norm();
}

}  // namespace

bool region_contains(const GroundSpace& space, const Region& B,
                     const Point& x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          double v = x.coords[0];
          bool lo_ok = r.lo_open ? v > r.lo : v >= r.lo;
          bool hi_ok = r.hi_open ? v < r.hi : v <= r.hi;
          return lo_ok && hi_ok;
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          double d = base_distance(x, r.center);
          return r.open ? d < r.radius : d <= r.radius;
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          for (size_t i = 0; i < r.lo.size(); ++i)
            if (x.coords[i] < r.lo[i] || x.coords[i] > r.hi[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          return s > r.lo && (r.hi_open ? s < r.hi : s <= r.hi);
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return true;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            if (region_contains(space, part, x)) return true;
          return false;
        }
      },
      B.node());
}

bool region_in_closure(const GroundSpace& space, const Region& B,
                       const Point& x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          double v = x.coords[0];
          return v >= r.lo && v <= r.hi;
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          return base_distance(x, r.center) <= r.radius;
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          for (size_t i = 0; i < r.lo.size(); ++i)
            if (x.coords[i] < r.lo[i] || x.coords[i] > r.hi[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          return s >= r.lo && s <= r.hi;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return true;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            if (region_in_closure(space, part, x)) return true;
          return false;
        }
      },
      B.node());
}

bool region_in_interior(const GroundSpace& space, const Region& B,
                        const Point& x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          double v = x.coords[0];
          return v > r.lo && v < r.hi;
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          return base_distance(x, r.center) < r.radius;
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          for (size_t i = 0; i < r.lo.size(); ++i)
            if (x.coords[i] <= r.lo[i] || x.coords[i] >= r.hi[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          return s > r.lo && s < r.hi;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return true;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts)
            if (region_in_interior(space, part, x)) return true;
          return false;
        }
      },
      B.node());
}

bool region_on_boundary(const GroundSpace& space, const Region& B,
                        const Point& x) {
  if (space.dim() == 1) {
    // exact via merged interval normalization
    double v = x.coords[0];
    auto cl = merged_closure_pieces(space, B);
    bool in_cl = false;
    for (const auto& p : cl)
      if (v >= p.a && v <= p.b) in_cl = true;
    if (!in_cl) return false;
    auto in = merged_interior_pieces(space, B);
    for (const auto& p : in)
      if (v > p.a && v < p.b) return false;
    return true;
  }
  return region_in_closure(space, B, x) && !region_in_interior(space, B, x);
}

RegionExtremes region_extremes(const GroundSpace& space, const Region& B) {
  return std::visit(
      [&](const auto& r) -> RegionExtremes {
        using T = std::decay_t<decltype(r)>;
        RegionExtremes e;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          if (r.lo > r.hi || (r.lo == r.hi && (r.lo_open || r.hi_open)))
            return e;
          e.empty = false;
          if (!std::isfinite(r.hi)) {
            e.sup_norm = kInf;
            e.sup_attained = false;
          } else {
            double alo = std::fabs(r.lo), ahi = std::fabs(r.hi);
            if (ahi > alo) {
              e.sup_norm = ahi;
              e.sup_attained = !r.hi_open;
            } else if (alo > ahi) {
              e.sup_norm = alo;
              e.sup_attained = !r.lo_open;
            } else {
              e.sup_norm = alo;
              e.sup_attained = !r.lo_open || !r.hi_open;
            }
          }
          if (r.lo < 0 && r.hi > 0) {
            e.inf_forbidden = 0;
            e.inf_attained = false;
          } else if (r.lo >= 0) {
            e.inf_forbidden = r.lo;
            e.inf_attained = !r.lo_open;
          } else {
            e.inf_forbidden = std::fabs(r.hi);
            e.inf_attained = !r.hi_open;
          }
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          if (r.radius < 0 || (r.radius == 0 && r.open)) return e;
          e.empty = false;
          double cn = r.center.norm();
          e.sup_norm = cn + r.radius;
          e.sup_attained = !r.open;
          if (cn >= r.radius) {
            e.inf_forbidden = cn - r.radius;
            e.inf_attained = !r.open;
          } else {
            e.inf_forbidden = 0;
            e.inf_attained = false;
          }
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          for (size_t i = 0; i < r.lo.size(); ++i)
            if (r.lo[i] > r.hi[i]) return e;
          e.empty = false;
          double far2 = 0, near2 = 0;
          for (size_t i = 0; i < r.lo.size(); ++i) {
            far2 += std::pow(std::max(std::fabs(r.lo[i]), std::fabs(r.hi[i])),
                             2);
            double c = clamp(0.0, r.lo[i], r.hi[i]);
            near2 += c * c;
          }
          e.sup_norm = std::sqrt(far2);
          e.sup_attained = true;
          e.inf_forbidden = std::sqrt(near2);
          e.inf_attained = true;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          if (r.lo >= r.hi) return e;
          e.empty = false;
          e.sup_norm = r.hi;
          e.sup_attained = !r.hi_open && std::isfinite(r.hi);
          e.inf_forbidden = std::max(r.lo, 0.0);
          e.inf_attained = false;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          e.empty = false;
          e.sup_norm = kInf;
          e.sup_attained = false;
          e.inf_forbidden = 0;
          e.inf_attained = false;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          for (const auto& part : r.parts) {
            RegionExtremes pe = region_extremes(space, part);
            if (pe.empty) continue;
            e.empty = false;
            if (pe.sup_norm > e.sup_norm ||
                (pe.sup_norm == e.sup_norm && pe.sup_attained)) {
              e.sup_norm = pe.sup_norm;
              e.sup_attained = e.sup_attained || pe.sup_attained;
            }
            if (pe.inf_forbidden < e.inf_forbidden ||
                (pe.inf_forbidden == e.inf_forbidden && pe.inf_attained)) {
              e.inf_forbidden = pe.inf_forbidden;
              e.inf_attained = e.inf_attained || pe.inf_attained;
            }
          }
        }
        return e;
      },
      B.node());
}

BoundednessWitness is_bounded(const GroundSpace& space, const Region& B) {
  RegionExtremes e = region_extremes(space, B);
  if (e.empty) return {true, 1};
  if (space.kind() == SpaceKind::Weak) return {true, 1};

  auto euclid_level = [&]() -> std::optional<int> {
    if (!std::isfinite(e.sup_norm)) return std::nullopt;
    int m = e.sup_attained
                ? static_cast<int>(std::floor(e.sup_norm)) + 1
                : std::max(1, static_cast<int>(std::ceil(e.sup_norm)));
    return std::max(1, m);
  };
  auto forbidden_level = [&]() -> std::optional<int> {
    if (!(e.inf_forbidden > 0)) return std::nullopt;
    double inv = 1.0 / e.inf_forbidden;
    int m = e.inf_attained ? static_cast<int>(std::floor(inv)) + 1
                           : std::max(1, static_cast<int>(std::ceil(inv)));
    return std::max(1, m);
  };

  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      auto m = euclid_level();
      if (!m) return {false, 0};
      return {true, *m};
    }
    case SpaceKind::HalflineHL: {
      auto m = forbidden_level();
      if (!m) return {false, 0};
      return {true, *m};
    }
    case SpaceKind::Punctured: {
      auto m1 = forbidden_level();
      if (!m1) return {false, 0};
      if (!space.radial_cap()) return {true, *m1};
      auto m2 = euclid_level();
      if (!m2) return {false, 0};
      return {true, std::max(*m1, *m2)};
    }
    default:
      return {true, 1};
  }
}

Region localizing_set(const GroundSpace& space, int m) {
  if (m < 1) throw SchemaError("localizing level must be >= 1");
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return Region::ball(Point(std::vector<double>(space.dim(), 0.0)),
                          double(m), /*open=*/true);
    case SpaceKind::Weak:
      return Region::whole_space();
    case SpaceKind::HalflineHL:
      return Region::interval(1.0 / m, kInf, /*lo_open=*/true,
                              /*hi_open=*/true);
    case SpaceKind::Punctured:
      if (space.radial_cap())
        return Region::annulus(1.0 / m, double(m), /*hi_open=*/true);
      return Region::annulus(1.0 / m, kInf, /*hi_open=*/true);
  }
  throw SchemaError("unknown space kind");
}

namespace {

double base_region_distance(const GroundSpace& space, const Point& x,
                            const Region& B) {
  if (space.dim() == 1)
    return base_dist_pieces_1d(x.coords[0], merged_closure_pieces(space, B));
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BallRegion>) {
          return std::max(base_distance(x, r.center) - r.radius, 0.0);
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          double s = 0;
          for (size_t i = 0; i < r.lo.size(); ++i) {
            double d = std::max({r.lo[i] - x.coords[i],
                                 x.coords[i] - r.hi[i], 0.0});
            s += d * d;
          }
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          if (s > r.hi) return s - r.hi;
          if (s < r.lo) return r.lo - s;
          return 0;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return 0;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          double best = kInf;
          for (const auto& part : r.parts)
            best = std::min(best, base_region_distance(space, x, part));
          return best;
        } else {
          // IntervalRegion only occurs in dim 1
          return kInf;
        }
      },
      B.node());
}

}  // namespace

double region_distance(const GroundSpace& space, const Point& x,
                       const Region& B, MetricChoice metric) {
  RegionExtremes e = region_extremes(space, B);
  if (e.empty) throw EmptyRegionError("distance to an empty region");
  space.require_member(x);
  if (metric == MetricChoice::Base) return base_region_distance(space, x, B);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return base_region_distance(space, x, B);
    case SpaceKind::Weak:
      return std::min(base_region_distance(space, x, B), 1.0);
    case SpaceKind::HalflineHL:
      return hu_dist_pieces_1d(space, x.coords[0],
                               merged_closure_pieces(space, B));
    case SpaceKind::Punctured: {
      if (space.dim() == 1)
        return hu_dist_pieces_1d(space, x.coords[0],
                                 merged_closure_pieces(space, B));
      std::vector<Piece> radial;
      collect_radial_pieces(space, B, radial);
      double s_x = space.forbidden_dist(x);
      double best = kInf;
      for (const auto& p : radial)
        best = std::min(best,
                        hu_inf_radial(s_x, /*same_side=*/true,
                                      std::max(p.a, 0.0), p.b));
      return best;
    }
  }
  throw SchemaError("unknown space kind");
}

namespace {

double base_interior_depth(const GroundSpace& space, const Point& x,
                           const Region& B) {
  if (space.dim() == 1) {
    auto comp = interior_complement_pieces(space, B);
    if (comp.empty()) return kInf;  // interior is all of X
    return base_dist_pieces_1d(x.coords[0], comp);
  }
  if (!region_in_interior(space, B, x)) return 0;
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BallRegion>) {
          return std::max(r.radius - base_distance(x, r.center), 0.0);
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          double d = kInf;
          for (size_t i = 0; i < r.lo.size(); ++i)
            d = std::min({d, x.coords[i] - r.lo[i], r.hi[i] - x.coords[i]});
          return std::max(d, 0.0);
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          double hi = std::isfinite(r.hi) ? r.hi - s : kInf;
          return std::max(std::min(s - r.lo, hi), 0.0);
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return kInf;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          // exact for parts with disjoint closures
          double best = 0;
          for (const auto& part : r.parts)
            best = std::max(best, base_interior_depth(space, x, part));
          return best;
        } else {
          return 0;
        }
      },
      B.node());
}

}  // namespace

double region_interior_depth(const GroundSpace& space, const Point& x,
                             const Region& B, MetricChoice metric) {
  space.require_member(x);
  if (metric == MetricChoice::Base) return base_interior_depth(space, x, B);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return base_interior_depth(space, x, B);
    case SpaceKind::Weak:
      return std::min(base_interior_depth(space, x, B), 1.0);
    case SpaceKind::HalflineHL:
    case SpaceKind::Punctured: {
      if (space.dim() == 1) {
        auto comp = interior_complement_pieces(space, B);
        if (comp.empty()) return kInf;
        return hu_dist_pieces_1d(space, x.coords[0], comp);
      }
      // punctured(k>=2): radial regions only
      std::vector<Piece> radial;
      collect_radial_pieces(space, B, radial);
      // complement of the union of open radial intervals, in s > 0
      std::sort(radial.begin(), radial.end(),
                [](const Piece& l, const Piece& r) { return l.a < r.a; });
      std::vector<Piece> merged;
      for (const auto& p : radial) {
        if (!merged.empty() && p.a < merged.back().b)
          merged.back().b = std::max(merged.back().b, p.b);
        else
          merged.push_back(p);
      }
      std::vector<Piece> comp;
      double cursor = 0;
      for (const auto& p : merged) {
        if (p.a >= cursor) comp.push_back({cursor, p.a});
        cursor = p.b;
      }
      comp.push_back({cursor, kInf});
      comp.erase(std::remove_if(comp.begin(), comp.end(),
                                [](const Piece& p) {
                                  return !piece_nonempty(p) || p.b <= 0;
                                }),
                 comp.end());
      if (comp.empty()) return kInf;
      double s_x = space.forbidden_dist(x);
      double best = kInf;
      for (const auto& p : comp)
        best = std::min(best, hu_inf_radial(s_x, true, std::max(p.a, 0.0),
                                            p.b));
      return best;
    }
  }
  throw SchemaError("unknown space kind");
}

Point region_project(const GroundSpace& space, const Region& B,
                     const Point& x) {
  RegionExtremes e = region_extremes(space, B);
  if (e.empty) throw EmptyRegionError("projection onto an empty region");
  return std::visit(
      [&](const auto& r) -> Point {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          return Point{clamp(x.coords[0], r.lo, r.hi)};
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          double d = base_distance(x, r.center);
          if (d <= r.radius) return x;
          Point y = r.center;
          for (size_t i = 0; i < y.coords.size(); ++i)
            y.coords[i] += (x.coords[i] - r.center.coords[i]) * r.radius / d;
          return y;
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          Point y = x;
          for (size_t i = 0; i < r.lo.size(); ++i)
            y.coords[i] = clamp(x.coords[i], r.lo[i], r.hi[i]);
          return y;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          double s = radial_of(space, x);
          double t = clamp(s, r.lo, r.hi);
          if (s > 0) {
            Point y = x;
            for (auto& c : y.coords) c *= t / s;
            return y;
          }
          Point y(std::vector<double>(space.dim(), 0.0));
          y.coords[0] = t;
          return y;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          return x;
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          double best = kInf;
          Point arg = x;
          for (const auto& part : r.parts) {
            RegionExtremes pe = region_extremes(space, part);
            if (pe.empty) continue;
            Point y = region_project(space, part, x);
            double d = base_distance(x, y);
            if (d < best) {
              best = d;
              arg = y;
            }
          }
          return arg;
        }
      },
      B.node());
}

// ---------------------------------------------------------------------------
// JSON

json space_to_json(const GroundSpace& space) {
  json j;
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      j["kind"] = "euclidean";
      j["dim"] = space.dim();
      break;
    case SpaceKind::Weak:
      j["kind"] = "weak";
      j["dim"] = space.dim();
      break;
    case SpaceKind::Punctured:
      j["kind"] = "punctured";
      j["dim"] = space.dim();
      j["cap"] = space.radial_cap();
      break;
    case SpaceKind::HalflineHL:
      j["kind"] = "halfline_hl";
      break;
  }
  return j;
}

GroundSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw SchemaError("space descriptor requires a \"kind\" field");
  std::string kind = j.at("kind").get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string k = it.key();
    if (k != "kind" && k != "dim" && k != "cap")
      throw SchemaError("unknown field in space descriptor: " + k);
  }
  if (kind == "halfline_hl") return GroundSpace::halfline_hl();
  if (!j.contains("dim"))
    throw SchemaError("space descriptor requires \"dim\" for kind " + kind);
  int dim = j.at("dim").get<int>();
  if (kind == "euclidean") return GroundSpace::euclidean(dim);
  if (kind == "weak") return GroundSpace::weak(dim);
  if (kind == "punctured")
    return GroundSpace::punctured(dim, j.value("cap", false));
  throw SchemaError("unknown space kind: " + kind);
}

json region_to_json(const Region& B) {
  return std::visit(
      [&](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        json j;
        if constexpr (std::is_same_v<T, IntervalRegion>) {
          j["type"] = "interval";
          j["lo"] = r.lo;
          if (std::isfinite(r.hi)) j["hi"] = r.hi;
          j["lo_open"] = r.lo_open;
          j["hi_open"] = r.hi_open;
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          j["type"] = "ball";
          j["center"] = r.center.coords;
          j["radius"] = r.radius;
          j["open"] = r.open;
        } else if constexpr (std::is_same_v<T, BoxRegion>) {
          j["type"] = "box";
          j["lo"] = r.lo;
          j["hi"] = r.hi;
        } else if constexpr (std::is_same_v<T, AnnulusRegion>) {
          j["type"] = "annulus";
          j["lo"] = r.lo;
          if (std::isfinite(r.hi)) j["hi"] = r.hi;
          j["hi_open"] = r.hi_open;
        } else if constexpr (std::is_same_v<T, WholeSpaceRegion>) {
          j["type"] = "all";
        } else if constexpr (std::is_same_v<T, UnionRegion>) {
          j["type"] = "union";
          j["parts"] = json::array();
          for (const auto& part : r.parts)
            j["parts"].push_back(region_to_json(part));
        }
        return j;
      },
      B.node());
}

Region region_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw SchemaError("region descriptor requires a \"type\" field");
  std::string type = j.at("type").get<std::string>();
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = it.key() == "type";
      for (const char* a : allowed)
        if (it.key() == a) ok = true;
      if (!ok)
        throw SchemaError("unknown field in region descriptor: " + it.key());
    }
  };
  if (type == "interval") {
    check_keys({"lo", "hi", "lo_open", "hi_open"});
    double hi = j.contains("hi") ? j.at("hi").get<double>() : kInf;
    return Region::interval(j.at("lo").get<double>(), hi,
                            j.value("lo_open", false),
                            j.value("hi_open", !j.contains("hi")));
  }
  if (type == "ball") {
    check_keys({"center", "radius", "open"});
    return Region::ball(Point(j.at("center").get<std::vector<double>>()),
                        j.at("radius").get<double>(), j.value("open", false));
  }
  if (type == "box") {
    check_keys({"lo", "hi"});
    return Region::box(j.at("lo").get<std::vector<double>>(),
                       j.at("hi").get<std::vector<double>>());
  }
  if (type == "annulus") {
    check_keys({"lo", "hi", "hi_open"});
    double hi = j.contains("hi") ? j.at("hi").get<double>() : kInf;
    return Region::annulus(j.at("lo").get<double>(), hi,
                           j.value("hi_open", !j.contains("hi")));
  }
  if (type == "all") {
    check_keys({});
    return Region::whole_space();
  }
  if (type == "union") {
    check_keys({"parts"});
    std::vector<Region> parts;
    for (const auto& p : j.at("parts")) parts.push_back(region_from_json(p));
    return Region::union_of(std::move(parts));
  }
  throw SchemaError("unknown region type: " + type);
}

}  // namespace vague
