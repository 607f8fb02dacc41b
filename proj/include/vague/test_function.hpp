#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/space.hpp"

namespace vague {

/// Evaluable nonnegative function with certified metadata: a Lipschitz
/// constant w.r.t. the space's Hu metric, the smallest level m with support
/// contained in K_m, and a sup bound.  Functions are stored as expression
/// trees over a closed set of primitives, so the metadata is exact by
/// construction.
class TestFunction {
 public:
  double operator()(const Point& x) const;

  double lipschitz_const() const;
  int support_level() const;
  double sup_bound() const;
  const GroundSpace& space() const;
  std::string describe() const;

  /// f+_{m}(x) = 1 - (m * d(x, cl(B)) ^ 1), d = Hu metric.  Requires the
  /// closed 1/m-thickening of cl(B) to be bounded.
  static TestFunction upper_approx(const GroundSpace& space, const Region& B,
                                   int m);
  /// f-_{m}(x) = m * d(x, complement of interior(B)) ^ 1.
  static TestFunction lower_approx(const GroundSpace& space, const Region& B,
                                   int m);
  /// The bump g_m, a valid h_m with h_m >= 1_{K_m}.
  static TestFunction bump(const GroundSpace& space, int m);
  /// alpha * f + beta * g (cone combination), alpha, beta >= 0.
  static TestFunction cone(double alpha, const TestFunction& f, double beta,
                           const TestFunction& g);
  /// Pointwise product f * g.
  static TestFunction prod(const TestFunction& f, const TestFunction& g);

  nlohmann::json to_json() const;
  static TestFunction from_json(const GroundSpace& space,
                                const nlohmann::json& j);

  struct Node;

 private:
  explicit TestFunction(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Finite indexed family of certified test functions.  When the closure
/// flags are set the members are stored as formal cone/product combinations
/// of the generators, so the family is closed by construction.
struct FunctionFamily {
  std::vector<TestFunction> members;
  bool cone_closed = false;
  bool multiplicative_closed = false;
};

/// Deterministic finite surrogate for the Lipschitz class LB_b^+(X, d):
/// upper/lower approximants of seeded regions inside the first ceil(count/2)
/// localizing sets, plus positive combinations.
FunctionFamily lipschitz_battery(const GroundSpace& space, int count,
                                 uint64_t seed);

/// Multiplicatively closed family: bump generators h_m (h_m >= 1_{K_m} with
/// delta_m = 1) together with seeded cone and product combinations.
FunctionFamily multiplicative_family(const GroundSpace& space,
                                     int generator_count, uint64_t seed);

/// d(x, y) = sum_i 2^{-i} |f_i(x) - f_i(y)| over the (finite) family; a
/// pseudo-metric.  Members must be [0,1]-valued.
double induced_metric(const FunctionFamily& family, const Point& x,
                      const Point& y);

nlohmann::json family_to_json(const FunctionFamily& family);
FunctionFamily family_from_json(const GroundSpace& space,
                                const nlohmann::json& j);

}  // namespace vague
