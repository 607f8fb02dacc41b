#include "vague/measure.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "vague/test_function.hpp"

namespace vague {

using json = nlohmann::json;

DiscreteMeasure::DiscreteMeasure(GroundSpace space, std::vector<Atom> atoms)
    : space_(std::move(space)) {
  for (const auto& a : atoms) {
    space_.require_member(a.point);
    if (!(a.weight > 0))
      throw SchemaError("atom weights must be strictly positive");
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) {
    return l.point < r.point;
  });
  for (auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().point == a.point)
      atoms_.back().weight += a.weight;
    else
      atoms_.push_back(std::move(a));
  }
  for (const auto& a : atoms_) total_mass_ += a.weight;
}

DiscreteMeasure DiscreteMeasure::restrict(const Region& B) const {
  std::vector<Atom> kept;
  for (const auto& a : atoms_)
    if (region_contains(space_, B, a.point)) kept.push_back(a);
  return DiscreteMeasure(space_, std::move(kept));
}

double DiscreteMeasure::integrate(const TestFunction& f) const {
  double s = 0;
  for (const auto& a : atoms_) s += a.weight * f(a.point);
  return s;
}

double DiscreteMeasure::mass(const Region& B) const {
  double s = 0;
  for (const auto& a : atoms_)
    if (region_contains(space_, B, a.point)) s += a.weight;
  return s;
}

double DiscreteMeasure::boundary_mass(const Region& B) const {
  double s = 0;
  for (const auto& a : atoms_)
    if (region_on_boundary(space_, B, a.point)) s += a.weight;
  return s;
}

bool DiscreteMeasure::is_point_measure(double tol) const {
  for (const auto& a : atoms_) {
    double r = std::round(a.weight);
    if (r < 1 || std::fabs(a.weight - r) > tol) return false;
  }
  return true;
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& o) const {
  if (!(space_ == o.space_) || atoms_.size() != o.atoms_.size()) return false;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (!(atoms_[i].point == o.atoms_[i].point) ||
        atoms_[i].weight != o.atoms_[i].weight)
      return false;
  return true;
}

DiscreteMeasure add(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.space_ == nu.space_))
    throw SpaceMismatchError("adding measures on different spaces");
  std::vector<Atom> atoms = mu.atoms_;
  atoms.insert(atoms.end(), nu.atoms_.begin(), nu.atoms_.end());
  return DiscreteMeasure(mu.space_, std::move(atoms));
}

DiscreteMeasure scale(const DiscreteMeasure& mu, double c) {
  if (c < 0) throw SchemaError("measure scale factor must be >= 0");
  if (c == 0) return DiscreteMeasure::zero(mu.space_);
  std::vector<Atom> atoms = mu.atoms_;
  for (auto& a : atoms) a.weight *= c;
  return DiscreteMeasure(mu.space_, std::move(atoms));
}

LocallyFiniteMeasure::LocallyFiniteMeasure(GroundSpace space, Generator gen)
    : space_(std::move(space)),
      gen_(std::move(gen)),
      cache_(std::make_shared<Cache>()) {}

LocallyFiniteMeasure LocallyFiniteMeasure::from_finite(
    const DiscreteMeasure& mu) {
  GroundSpace space = mu.space();
  return LocallyFiniteMeasure(space, [mu, space](int m) {
    return mu.restrict(localizing_set(space, m));
  });
}

DiscreteMeasure LocallyFiniteMeasure::level(int m) const {
  if (m < 1) throw SchemaError("level must be >= 1");
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->levels.find(m);
    if (it != cache_->levels.end()) return it->second;
  }
  DiscreteMeasure val = [&] {
    try {
      return gen_(m);
    } catch (const std::exception& e) {
      throw MaterializationError(std::string("level generator failed: ") +
                                 e.what());
    }
  }();
  Region km = localizing_set(space_, m);
  for (const auto& a : val.atoms())
    if (!region_contains(space_, km, a.point))
      throw MaterializationError(
          "generator produced an atom outside K_m at level " +
          std::to_string(m));
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto [it, inserted] = cache_->levels.emplace(m, val);
  return it->second;
}

int LocallyFiniteMeasure::max_materialized() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->levels.empty() ? 0 : cache_->levels.rbegin()->first;
}

DiscreteMeasure truncate(const LocallyFiniteMeasure& mu, int m) {
  if (m < 1) throw SchemaError("truncation level must be >= 1");
  DiscreteMeasure lev = mu.level(m + 1);
  std::vector<Atom> atoms;
  for (const auto& a : lev.atoms()) {
    double w = a.weight * mu.space().bump(m, a.point);
    if (w > 0) atoms.push_back({a.point, w});
  }
  return DiscreteMeasure(mu.space(), std::move(atoms));
}

json measure_to_json(const DiscreteMeasure& mu) {
  json j;
  j["space"] = space_to_json(mu.space());
  j["atoms"] = json::array();
  for (const auto& a : mu.atoms()) {
    json ja;
    ja["x"] = a.point.coords;
    ja["w"] = a.weight;
    j["atoms"].push_back(ja);
  }
  return j;
}

DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space") || !j.contains("atoms"))
    throw SchemaError("measure file requires \"space\" and \"atoms\"");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "space" && it.key() != "atoms" &&
        it.key() != "point_measure")
      throw SchemaError("unknown field in measure file: " + it.key());
  GroundSpace space = space_from_json(j.at("space"));
  std::vector<Atom> atoms;
  for (const auto& ja : j.at("atoms")) {
    for (auto it = ja.begin(); it != ja.end(); ++it)
      if (it.key() != "x" && it.key() != "w")
        throw SchemaError("unknown field in atom: " + it.key());
    atoms.push_back({Point(ja.at("x").get<std::vector<double>>()),
                     ja.value("w", 1.0)});
  }
  DiscreteMeasure mu(space, std::move(atoms));
  if (j.value("point_measure", false)) {
    for (const auto& a : mu.atoms())
      if (a.weight != 1.0)
        throw SchemaError(
            "point_measure flag requires all atom weights equal to 1");
  }
  return mu;
}

}  // namespace vague
