#include "vague/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vague/rng.hpp"

namespace vague {

using json = nlohmann::json;

struct TestFunction::Node {
  enum Kind { Upper, Lower, Bump, Cone, Prod } kind;
  GroundSpace space;
  std::optional<Region> region;  // Upper/Lower
  int m = 0;                     // Upper/Lower/Bump
  double alpha = 0, beta = 0;    // Cone
  std::shared_ptr<const Node> f, g;

  double lipschitz = 0;
  double sup = 0;
  int support_level = 1;

  Node(Kind k, GroundSpace s) : kind(k), space(std::move(s)) {}
};

TestFunction::TestFunction(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

const GroundSpace& TestFunction::space() const { return node_->space; }
double TestFunction::lipschitz_const() const { return node_->lipschitz; }
double TestFunction::sup_bound() const { return node_->sup; }
int TestFunction::support_level() const { return node_->support_level; }

namespace {

double eval_node(const TestFunction::Node& n, const Point& x) {
  using Node = TestFunction::Node;
  switch (n.kind) {
    case Node::Upper: {
      double d = region_distance(n.space, x, *n.region, MetricChoice::Hu);
      return 1.0 - std::min(n.m * d, 1.0);
    }
    case Node::Lower: {
      double d = region_interior_depth(n.space, x, *n.region,
                                       MetricChoice::Hu);
      if (std::isinf(d)) return 1.0;
      return std::min(n.m * d, 1.0);
    }
    case Node::Bump:
      return n.space.bump(n.m, x);
    case Node::Cone:
      return n.alpha * eval_node(*n.f, x) + n.beta * eval_node(*n.g, x);
    case Node::Prod:
      return eval_node(*n.f, x) * eval_node(*n.g, x);
  }
  return 0;
}

}  // namespace

double TestFunction::operator()(const Point& x) const {
  return eval_node(*node_, x);
}

TestFunction TestFunction::upper_approx(const GroundSpace& space,
                                        const Region& B, int m) {
  if (m < 1) throw SchemaError("approximant sharpness m must be >= 1");
  BoundednessWitness w = is_bounded(space, B);
  if (!w.bounded)
    throw SchemaError("upper approximant requires a bounded region");
  RegionExtremes e = region_extremes(space, B);
  if (e.empty) throw EmptyRegionError("upper approximant of an empty region");
  double eps = 1.0 / m;

  auto node = std::make_shared<Node>(Node::Upper, space);
  node->region = B;
  node->m = m;
  node->lipschitz = m;
  node->sup = 1.0;
  switch (space.kind()) {
    case SpaceKind::Weak:
      node->support_level = 1;
      break;
    case SpaceKind::Euclidean:
      node->support_level =
          static_cast<int>(std::floor(e.sup_norm + eps)) + 1;
      break;
    case SpaceKind::HalflineHL:
      node->support_level =
          static_cast<int>(std::floor(1.0 / e.inf_forbidden + eps)) + 1;
      break;
    case SpaceKind::Punctured: {
      int lev = static_cast<int>(std::floor(1.0 / e.inf_forbidden + eps)) + 1;
      if (space.radial_cap()) {
        if (eps >= 1.0)
          throw SchemaError(
              "1/m-thickening is unbounded on the capped punctured space; "
              "increase m");
        lev = std::max(
            lev, static_cast<int>(std::floor(e.sup_norm + eps)) + 1);
      }
      node->support_level = lev;
      break;
    }
  }
  return TestFunction(node);
}

TestFunction TestFunction::lower_approx(const GroundSpace& space,
                                        const Region& B, int m) {
  if (m < 1) throw SchemaError("approximant sharpness m must be >= 1");
  BoundednessWitness w = is_bounded(space, B);
  if (!w.bounded)
    throw SchemaError("lower approximant requires a bounded region");
  auto node = std::make_shared<Node>(Node::Lower, space);
  node->region = B;
  node->m = m;
  node->lipschitz = m;
  node->sup = 1.0;
  node->support_level = w.level;
  return TestFunction(node);
}

TestFunction TestFunction::bump(const GroundSpace& space, int m) {
  if (m < 1) throw SchemaError("bump level must be >= 1");
  auto node = std::make_shared<Node>(Node::Bump, space);
  node->m = m;
  node->lipschitz = 1.0;
  node->sup = 1.0;
  node->support_level = (space.kind() == SpaceKind::Weak) ? 1 : m + 1;
  return TestFunction(node);
}

TestFunction TestFunction::cone(double alpha, const TestFunction& f,
                                double beta, const TestFunction& g) {
  if (alpha < 0 || beta < 0)
    throw SchemaError("cone coefficients must be >= 0");
  if (!(f.space() == g.space()))
    throw SpaceMismatchError("cone combination across spaces");
  auto node = std::make_shared<Node>(Node::Cone, f.space());
  node->alpha = alpha;
  node->beta = beta;
  node->f = f.node_;
  node->g = g.node_;
  node->lipschitz = alpha * f.lipschitz_const() + beta * g.lipschitz_const();
  node->sup = alpha * f.sup_bound() + beta * g.sup_bound();
  node->support_level = std::max(f.support_level(), g.support_level());
  return TestFunction(node);
}

TestFunction TestFunction::prod(const TestFunction& f, const TestFunction& g) {
  if (!(f.space() == g.space()))
    throw SpaceMismatchError("product across spaces");
  auto node = std::make_shared<Node>(Node::Prod, f.space());
  node->f = f.node_;
  node->g = g.node_;
  node->lipschitz = f.lipschitz_const() * g.sup_bound() +
                    g.lipschitz_const() * f.sup_bound();
  node->sup = f.sup_bound() * g.sup_bound();
  node->support_level = std::min(f.support_level(), g.support_level());
  return TestFunction(node);
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  switch (node_->kind) {
    case Node::Upper:
      os << "upper(m=" << node_->m << ")";
      break;
    case Node::Lower:
      os << "lower(m=" << node_->m << ")";
      break;
    case Node::Bump:
      os << "bump(m=" << node_->m << ")";
      break;
    case Node::Cone:
      os << "cone(" << node_->alpha << "," << node_->beta << ")";
      break;
    case Node::Prod:
      os << "prod";
      break;
  }
  return os.str();
}

json TestFunction::to_json() const {
  using Node = TestFunction::Node;
  json j;
  switch (node_->kind) {
    case Node::Upper:
      j["op"] = "upper";
      j["region"] = region_to_json(*node_->region);
      j["m"] = node_->m;
      break;
    case Node::Lower:
      j["op"] = "lower";
      j["region"] = region_to_json(*node_->region);
      j["m"] = node_->m;
      break;
    case Node::Bump:
      j["op"] = "bump";
      j["m"] = node_->m;
      break;
    case Node::Cone:
      j["op"] = "cone";
      j["alpha"] = node_->alpha;
      j["f"] = TestFunction(node_->f).to_json();
      j["beta"] = node_->beta;
      j["g"] = TestFunction(node_->g).to_json();
      break;
    case Node::Prod:
      j["op"] = "prod";
      j["f"] = TestFunction(node_->f).to_json();
      j["g"] = TestFunction(node_->g).to_json();
      break;
  }
  return j;
}

TestFunction TestFunction::from_json(const GroundSpace& space, const json& j) {
  if (!j.is_object() || !j.contains("op"))
    throw SchemaError("function descriptor requires an \"op\" field");
  std::string op = j.at("op").get<std::string>();
  if (op == "upper")
    return upper_approx(space, region_from_json(j.at("region")),
                        j.at("m").get<int>());
  if (op == "lower")
    return lower_approx(space, region_from_json(j.at("region")),
                        j.at("m").get<int>());
  if (op == "bump") return bump(space, j.at("m").get<int>());
  if (op == "cone")
    return cone(j.at("alpha").get<double>(), from_json(space, j.at("f")),
                j.at("beta").get<double>(), from_json(space, j.at("g")));
  if (op == "prod")
    return prod(from_json(space, j.at("f")), from_json(space, j.at("g")));
  throw SchemaError("unknown function op: " + op);
}

namespace {

/// A seeded catalogue region strictly inside K_m.
Region seeded_region(const GroundSpace& space, int m, Rng& rng) {
  switch (space.kind()) {
    case SpaceKind::HalflineHL:
    case SpaceKind::Punctured: {
      double lo = 1.0 / m + rng.uniform(0.05, 1.0);
      double width = rng.uniform(0.3, 2.0);
      double hi = lo + width;
      if (space.radial_cap()) hi = std::min(hi, double(m) - 0.05);
      return Region::annulus(lo, std::max(hi, lo + 0.1));
    }
    case SpaceKind::Euclidean: {
      if (space.dim() == 1) {
        double a = rng.uniform(-double(m) + 0.1, double(m) - 0.5);
        double b = a + rng.uniform(0.2, std::min(2.0, double(m) - 0.1 - a));
        return Region::interval(a, b);
      }
      double r = rng.uniform(0.2, 0.45 * m);
      std::vector<double> c(space.dim());
      for (auto& v : c) v = rng.uniform(-0.3 * m, 0.3 * m);
      return Region::ball(Point(c), r);
    }
    case SpaceKind::Weak: {
      if (space.dim() == 1) {
        double a = rng.uniform(-3.0, 2.0);
        return Region::interval(a, a + rng.uniform(0.3, 2.0));
      }
      double r = rng.uniform(0.2, 2.0);
      std::vector<double> c(space.dim());
      for (auto& v : c) v = rng.uniform(-2.0, 2.0);
      return Region::ball(Point(c), r);
    }
  }
  throw SchemaError("unknown space kind");
}

}  // namespace

FunctionFamily lipschitz_battery(const GroundSpace& space, int count,
                                 uint64_t seed) {
  if (count < 1) throw SchemaError("battery size must be >= 1");
  FunctionFamily fam;
  Rng rng({seed, 0x11b5c4u});
  int levels = std::max(1, (count + 1) / 2);
  int level = 1;
  while (static_cast<int>(fam.members.size()) < count) {
    Region B = seeded_region(space, level, rng);
    int sharp = 2 + rng.uniform_int(0, 2);
    fam.members.push_back(TestFunction::lower_approx(space, B, sharp));
    if (static_cast<int>(fam.members.size()) < count)
      fam.members.push_back(TestFunction::upper_approx(space, B, sharp));
    // an occasional positive combination of the latest pair
    if (static_cast<int>(fam.members.size()) < count &&
        fam.members.size() >= 2 && rng.uniform01() < 0.3) {
      size_t k = fam.members.size();
      fam.members.push_back(TestFunction::cone(
          rng.uniform(0.2, 1.0), fam.members[k - 2], rng.uniform(0.2, 1.0),
          fam.members[k - 1]));
    }
    level = level % levels + 1;
  }
  fam.members.resize(count, fam.members.front());
  return fam;
}

FunctionFamily multiplicative_family(const GroundSpace& space,
                                     int generator_count, uint64_t seed) {
  if (generator_count < 1)
    throw SchemaError("generator count must be >= 1");
  FunctionFamily fam;
  fam.cone_closed = true;
  fam.multiplicative_closed = true;
  Rng rng({seed, 0x4a17fdu});
  std::vector<TestFunction> gens;
  for (int m = 1; m <= generator_count; ++m)
    gens.push_back(TestFunction::bump(space, m));
  fam.members = gens;
  // seeded products and cone combinations of the generators
  for (int i = 0; i + 1 < generator_count; ++i)
    fam.members.push_back(TestFunction::prod(gens[i], gens[i + 1]));
  for (int i = 0; i + 1 < generator_count && i < 2; ++i)
    fam.members.push_back(TestFunction::cone(rng.uniform(0.5, 2.0), gens[i],
                                             rng.uniform(0.5, 2.0),
                                             gens[i + 1]));
  if (generator_count >= 1)
    fam.members.push_back(TestFunction::prod(gens[0], gens[0]));
  return fam;
}

double induced_metric(const FunctionFamily& family, const Point& x,
                      const Point& y) {
  double s = 0;
  double w = 1.0;
  for (const auto& f : family.members) {
    if (f.sup_bound() > 1.0 + 1e-12)
      throw SchemaError(
          "induced metric requires [0,1]-valued family members");
    w *= 0.5;
    s += w * std::fabs(f(x) - f(y));
  }
  return s;
}

json family_to_json(const FunctionFamily& family) {
  json j;
  j["members"] = json::array();
  for (const auto& f : family.members) j["members"].push_back(f.to_json());
  j["cone"] = family.cone_closed;
  j["multiplicative"] = family.multiplicative_closed;
  return j;
}

FunctionFamily family_from_json(const GroundSpace& space, const json& j) {
  FunctionFamily fam;
  for (const auto& jm : j.at("members"))
    fam.members.push_back(TestFunction::from_json(space, jm));
  fam.cone_closed = j.value("cone", false);
  fam.multiplicative_closed = j.value("multiplicative", false);
  return fam;
}

}  // namespace vague
