#pragma once

// Shared test economies. The "gears" economy is the hand-checked micro
// fixture used across the suites: three materials, two interchangeable gear
// recipes and a box that consumes one gear and three plastic parts.

#include <string>

#include <circloop/circloop.hpp>

namespace circloop::testing {

inline const char* kGearsJson = R"json({
  "schema_version": "circloop/1",
  "raw_materials": [
    {"name": "steel", "unit": "kg", "base_time": 2.0, "base_climate": 5.0},
    {"name": "recycled_steel", "unit": "kg", "base_time": 1.0, "base_climate": 1.0},
    {"name": "plastic", "unit": "kg", "base_time": 1.0, "base_climate": 3.0}
  ],
  "products": [
    {"name": "S",  "level": 0, "features": ["metal"],
     "inputs": [{"quantity": 1.0, "supplier": "steel"}]},
    {"name": "RS", "level": 0, "features": ["metal"],
     "inputs": [{"quantity": 1.0, "supplier": "recycled_steel"}]},
    {"name": "PL", "level": 0, "features": ["polymer"],
     "inputs": [{"quantity": 1.0, "supplier": "plastic"}]},
    {"name": "G",  "level": 1, "features": ["gear"],
     "inputs": [{"quantity": 2.0, "supplier": "S"}]},
    {"name": "GR", "level": 1, "features": ["gear"],
     "inputs": [{"quantity": 2.0, "supplier": "RS"}]},
    {"name": "B",  "level": 2, "features": ["box"],
     "inputs": [{"quantity": 1.0, "supplier": "G"}, {"quantity": 3.0, "supplier": "PL"}]}
  ]
})json";

inline Economy make_gears() {
  EconomyParse parsed = parse_economy(kGearsJson);
  if (!parsed.economy) throw std::logic_error("gears fixture failed to parse");
  return std::move(*parsed.economy);
}

/// Demand one box; all weights 1; climate capped at 12 unless told otherwise.
inline PlanContext make_gears_ctx(const Economy& eco, double max_climate = 12.0) {
  PlanetaryBounds bounds;
  bounds.max_climate = max_climate;
  return PlanContext(eco, Demand(eco, {{eco.find_product("B"), 1.0}}),
                     Weights::ones(eco.material_count()), bounds);
}

/// Two-level economy with a coordination trap: fixing P1's metal first makes
/// the jointly better switch to P2 look like a regression, so greedy and
/// width-1 beam stall at score 6 while the optimum is 3.
inline const char* kTrapJson = R"json({
  "schema_version": "circloop/1",
  "raw_materials": [
    {"name": "cheap", "unit": "kg", "base_time": 1.0, "base_climate": 1.0},
    {"name": "expensive", "unit": "kg", "base_time": 10.0, "base_climate": 10.0}
  ],
  "products": [
    {"name": "wa", "level": 0, "features": ["metal"],
     "inputs": [{"quantity": 1.0, "supplier": "cheap"}]},
    {"name": "wb", "level": 0, "features": ["metal"],
     "inputs": [{"quantity": 1.0, "supplier": "expensive"}]},
    {"name": "P1", "level": 1, "features": ["part"],
     "inputs": [{"quantity": 2.0, "supplier": "wb"}]},
    {"name": "P2", "level": 1, "features": ["part"],
     "inputs": [{"quantity": 1.0, "supplier": "wb"}]},
    {"name": "R",  "level": 2, "features": ["root"],
     "inputs": [{"quantity": 1.0, "supplier": "P1"}]}
  ]
})json";

inline Economy make_trap() {
  EconomyParse parsed = parse_economy(kTrapJson);
  if (!parsed.economy) throw std::logic_error("trap fixture failed to parse");
  return std::move(*parsed.economy);
}

inline PlanContext make_trap_ctx(const Economy& eco) {
  return PlanContext(eco, Demand(eco, {{eco.find_product("R"), 1.0}}),
                     Weights::ones(eco.material_count()), PlanetaryBounds{});
}

/// Demand on every top-level product, one unit each.
inline Demand top_level_demand(const Economy& eco) {
  std::vector<std::pair<int, double>> entries;
  for (int p = 0; p < eco.product_count(); ++p)
    if (eco.products[p].level == eco.max_level()) entries.emplace_back(p, 1.0);
  return Demand(eco, std::move(entries));
}

}  // namespace circloop::testing
