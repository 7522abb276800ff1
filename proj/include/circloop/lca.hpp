#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circloop/economy.hpp"

namespace circloop {

/// Absolute tolerance used wherever two impact values are compared for
/// equality.
inline constexpr double kImpactTolerance = 1e-9;

/// Impact tuple of a product: labour time (hours), climate cost (kgCO2e) and
/// gross raw-material quantities, one entry per material id.
struct LcaVector {
  double time = 0.0;
  double climate = 0.0;
  std::vector<double> materials;

  static LcaVector zeros(int material_count) {
    LcaVector v;
    v.materials.assign(static_cast<size_t>(material_count), 0.0);
    return v;
  }

  int dimension() const { return static_cast<int>(materials.size()); }

  LcaVector& operator+=(const LcaVector& o) {
    check_dims(o);
    time += o.time;
    climate += o.climate;
    for (size_t i = 0; i < materials.size(); ++i) materials[i] += o.materials[i];
    return *this;
  }

  LcaVector& operator-=(const LcaVector& o) {
    check_dims(o);
    time -= o.time;
    climate -= o.climate;
    for (size_t i = 0; i < materials.size(); ++i) materials[i] -= o.materials[i];
    return *this;
  }

  LcaVector& operator*=(double s) {
    time *= s;
    climate *= s;
    for (auto& m : materials) m *= s;
    return *this;
  }

  /// *this += s * o
  void add_scaled(const LcaVector& o, double s) {
    check_dims(o);
    time += s * o.time;
    climate += s * o.climate;
    for (size_t i = 0; i < materials.size(); ++i) materials[i] += s * o.materials[i];
  }

  bool is_zero() const {
    if (time != 0.0 || climate != 0.0) return false;
    for (double m : materials)
      if (m != 0.0) return false;
    return true;
  }

  bool almost_equal(const LcaVector& o, double tol = kImpactTolerance) const {
    if (dimension() != o.dimension()) return false;
    if (std::fabs(time - o.time) > tol || std::fabs(climate - o.climate) > tol) return false;
    for (size_t i = 0; i < materials.size(); ++i)
      if (std::fabs(materials[i] - o.materials[i]) > tol) return false;
    return true;
  }

  friend LcaVector operator+(LcaVector a, const LcaVector& b) { return a += b; }
  friend LcaVector operator-(LcaVector a, const LcaVector& b) { return a -= b; }
  friend LcaVector operator*(double s, LcaVector v) { return v *= s; }
  friend bool operator==(const LcaVector&, const LcaVector&) = default;

 private:
  void check_dims(const LcaVector& o) const {
    if (materials.size() != o.materials.size())
      throw std::invalid_argument("impact vector dimension mismatch: " +
                                  std::to_string(materials.size()) + " vs " +
                                  std::to_string(o.materials.size()));
  }
};

/// Impact of one unit of a raw material: its base labour and climate cost
/// plus a unit entry in its own material coordinate.
inline LcaVector lca_raw(const Economy& eco, int material_id) {
  const RawMaterial& m = eco.material(material_id);
  LcaVector v = LcaVector::zeros(eco.material_count());
  v.time = m.base_time;
  v.climate = m.base_climate;
  v.materials[material_id] = 1.0;
  return v;
}

/// Impact of a parent after replacing supplier x by y at a slot consuming
/// q units: parent - q*lca(x) + q*lca(y). With q = 1 this is the plain
/// subtract-and-add replacement rule.
inline LcaVector lca_apply_replacement(const LcaVector& parent, double q, const LcaVector& lca_x,
                                       const LcaVector& lca_y) {
  if (q < 0.0 || !std::isfinite(q)) throw std::invalid_argument("replacement quantity must be finite and >= 0");
  LcaVector out = parent;
  out.add_scaled(lca_x, -q);
  out.add_scaled(lca_y, q);
  return out;
}

/// Absolute per-indicator caps. An empty optional means unbounded; finite
/// caps must be >= 0. `max_materials` may be empty (all unbounded) or have
/// one entry per material.
struct PlanetaryBounds {
  std::optional<double> max_time;
  std::optional<double> max_climate;
  std::vector<std::optional<double>> max_materials;

  static PlanetaryBounds unbounded() { return {}; }

  void check(int material_count) const {
    auto bad = [](const std::optional<double>& c) {
      return c.has_value() && (!std::isfinite(*c) || *c < 0.0);
    };
    if (bad(max_time) || bad(max_climate))
      throw std::invalid_argument("finite caps must be >= 0");
    if (!max_materials.empty() && static_cast<int>(max_materials.size()) != material_count)
      throw std::invalid_argument("material cap dimension mismatch");
    for (const auto& c : max_materials)
      if (bad(c)) throw std::invalid_argument("finite caps must be >= 0");
  }
};

/// Scalarization weights; all >= 0 with at least one strictly positive.
struct Weights {
  double time = 1.0;
  double climate = 1.0;
  std::vector<double> materials;

  static Weights ones(int material_count) {
    Weights w;
    w.materials.assign(static_cast<size_t>(material_count), 1.0);
    return w;
  }

  void check(int material_count) const {
    if (static_cast<int>(materials.size()) != material_count)
      throw std::invalid_argument("weight dimension mismatch");
    bool positive = time > 0.0 || climate > 0.0;
    for (double m : materials) {
      if (!std::isfinite(m) || m < 0.0) throw std::invalid_argument("weights must be finite and >= 0");
      positive = positive || m > 0.0;
    }
    if (!std::isfinite(time) || time < 0.0 || !std::isfinite(climate) || climate < 0.0)
      throw std::invalid_argument("weights must be finite and >= 0");
    if (!positive) throw std::invalid_argument("at least one weight must be strictly positive");
  }
};

struct Violation {
  std::string indicator;
  double value = 0.0;
  double bound = 0.0;
  double excess = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// feasible <=> violations is empty.
struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;

  double total_excess() const {
    double t = 0.0;
    for (const auto& v : violations) t += v.excess;
    return t;
  }
};

/// Component-wise cap check. Violations are reported in indicator order:
/// time, climate, then materials by id.
inline FeasibilityReport check_bounds(const LcaVector& impact, const PlanetaryBounds& bounds) {
  if (!bounds.max_materials.empty() &&
      bounds.max_materials.size() != impact.materials.size())
    throw std::invalid_argument("bounds dimension mismatch");
  FeasibilityReport report;
  auto probe = [&](const std::string& name, double value, double cap, bool capped) {
    if (capped && value > cap) report.violations.push_back({name, value, cap, value - cap});
  };
  probe("time", impact.time, bounds.max_time.value_or(0.0), bounds.max_time.has_value());
  probe("climate", impact.climate, bounds.max_climate.value_or(0.0), bounds.max_climate.has_value());
  for (size_t i = 0; i < impact.materials.size(); ++i) {
    const bool capped = i < bounds.max_materials.size() && bounds.max_materials[i].has_value();
    probe("material_" + std::to_string(i), impact.materials[i],
          capped ? *bounds.max_materials[i] : 0.0, capped);
  }
  report.feasible = report.violations.empty();
  return report;
}

/// Weighted sum of all indicators; lower is better.
inline double scalarize(const LcaVector& impact, const Weights& w) {
  if (w.materials.size() != impact.materials.size())
    throw std::invalid_argument("weight dimension mismatch");
  double s = w.time * impact.time + w.climate * impact.climate;
  for (size_t i = 0; i < impact.materials.size(); ++i) s += w.materials[i] * impact.materials[i];
  return s;
}

}  // namespace circloop
