#pragma once

#include <algorithm>
#include <vector>

#include "circloop/configuration.hpp"

namespace circloop {

/// Per-material accounting of the byproduct loop closure. All vectors have
/// one entry per raw material; net + reused = gross holds per material.
struct ReuseReport {
  std::vector<double> gross;    ///< extraction demanded by production
  std::vector<double> supply;   ///< byproduct output available for reuse
  std::vector<double> reused;   ///< min(supply, gross) per material
  std::vector<double> net;      ///< gross - reused
  double circularity = 0.0;     ///< sum(reused) / sum(supply), 0 when nothing is supplied
};

/// Greedy global matching of byproduct streams against raw-material
/// extraction under the current configuration: production units accumulate
/// top-down from the demand, gross extraction is the units of level-0
/// wrappers, and every byproduct unit offsets extraction of the same
/// material where possible.
inline ReuseReport reuse_match(const Configuration& config, const Demand& demand) {
  const Economy& eco = config.economy();
  const int r = eco.material_count();
  std::vector<double> units = config.production_units(demand);

  ReuseReport rep;
  rep.gross.assign(r, 0.0);
  rep.supply.assign(r, 0.0);
  rep.reused.assign(r, 0.0);
  rep.net.assign(r, 0.0);

  for (int pid = 0; pid < eco.product_count(); ++pid) {
    if (units[pid] <= 0.0) continue;
    const auto& spec = eco.products[pid];
    if (spec.level == 0) rep.gross[spec.wrapped_material] += units[pid];
    for (const auto& bp : spec.byproducts) rep.supply[bp.material] += units[pid] * bp.quantity;
  }

  double total_supply = 0.0;
  double total_reused = 0.0;
  for (int i = 0; i < r; ++i) {
    rep.reused[i] = std::min(rep.supply[i], rep.gross[i]);
    rep.net[i] = rep.gross[i] - rep.reused[i];
    total_supply += rep.supply[i];
    total_reused += rep.reused[i];
  }
  rep.circularity = total_supply > 0.0 ? total_reused / total_supply : 0.0;
  return rep;
}

}  // namespace circloop
