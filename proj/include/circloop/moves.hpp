#pragma once

#include <cstdint>
#include <vector>

#include "circloop/configuration.hpp"
#include "circloop/reuse.hpp"

namespace circloop {

/// Everything a planning run needs besides the mutable configuration.
/// `reuse_credit` switches the material indicators from gross extraction to
/// net extraction after byproduct reuse; off by default so the impact equals
/// the plain recursive sum.
struct PlanContext {
  const Economy* eco = nullptr;
  Demand demand;
  Weights weights;
  PlanetaryBounds bounds;
  bool reuse_credit = false;

  PlanContext(const Economy& e, Demand d, Weights w, PlanetaryBounds b, bool credit = false)
      : eco(&e), demand(std::move(d)), weights(std::move(w)), bounds(std::move(b)),
        reuse_credit(credit) {
    weights.check(e.material_count());
    bounds.check(e.material_count());
  }
};

/// Scored state of one configuration: total impact, its scalarization, the
/// cap check, and the summed excess over all violated caps (0 iff feasible).
struct Evaluation {
  LcaVector impact;
  double score = 0.0;
  FeasibilityReport feasibility;
  double total_violation = 0.0;

  bool feasible() const { return feasibility.feasible; }
};

/// Search ordering: feasible beats infeasible, then lower score, then lower
/// total violation. Returns <0 when a ranks strictly better than b.
inline int compare_eval(const Evaluation& a, const Evaluation& b) {
  if (a.feasible() != b.feasible()) return a.feasible() ? -1 : 1;
  if (a.score != b.score) return a.score < b.score ? -1 : 1;
  if (a.total_violation != b.total_violation) return a.total_violation < b.total_violation ? -1 : 1;
  return 0;
}

/// Lexicographic move-list order; the final tie-breaker of the search
/// ordering.
inline int compare_move_lists(const std::vector<Move>& a, const std::vector<Move>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

/// Impact, score and feasibility of the current configuration.
inline Evaluation evaluate(const PlanContext& ctx, Configuration& config) {
  Evaluation ev;
  ev.impact = config.total_impact(ctx.demand);
  if (ctx.reuse_credit) {
    ReuseReport rep = reuse_match(config, ctx.demand);
    for (size_t i = 0; i < ev.impact.materials.size(); ++i) ev.impact.materials[i] = rep.net[i];
  }
  ev.score = scalarize(ev.impact, ctx.weights);
  ev.feasibility = check_bounds(ev.impact, ctx.bounds);
  ev.total_violation = ev.feasibility.total_excess();
  return ev;
}

/// All legal replacements under the current configuration: one move per
/// (slot of a demand-closure product, same-feature substitute below the
/// owner's level). Ordered by (owner id, slot, target id).
inline std::vector<Move> legal_moves(const PlanContext& ctx, const Configuration& config) {
  const Economy& eco = config.economy();
  std::vector<Move> out;
  for (int pid : config.demand_closure(ctx.demand)) {
    const auto& spec = eco.products[pid];
    for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s) {
      const int cur = config.chosen(pid, s);
      for (int target : eco.class_members(eco.feature_class(cur))) {
        if (target == cur || eco.products[target].level >= spec.level) continue;
        out.push_back({pid, s, cur, target});
      }
    }
  }
  return out;  // closure and class members ascend, so the order is already canonical
}

/// Number of legal move sequences of exactly `depth` moves, enumerated with
/// make/unmake. The standard move-generator validation count.
inline uint64_t perft(const PlanContext& ctx, Configuration& config, int depth) {
  if (depth < 0) throw std::invalid_argument("perft depth must be >= 0");
  if (depth == 0) return 1;
  uint64_t total = 0;
  for (const Move& m : legal_moves(ctx, config)) {
    UndoToken tok = config.apply(m);
    total += perft(ctx, config, depth - 1);
    config.undo(std::move(tok));
  }
  return total;
}

/// The canonical move list of a configuration: one move per demand-closure
/// slot whose chosen supplier differs from the default, ordered by
/// (owner, slot). Replaying it on a default configuration reproduces every
/// closure-relevant choice.
inline std::vector<Move> moves_from_default(const PlanContext& ctx, const Configuration& config) {
  const Economy& eco = config.economy();
  std::vector<Move> out;
  for (int pid : config.demand_closure(ctx.demand)) {
    const auto& spec = eco.products[pid];
    for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s) {
      const int cur = config.chosen(pid, s);
      if (cur != spec.inputs[s].default_supplier)
        out.push_back({pid, s, spec.inputs[s].default_supplier, cur});
    }
  }
  return out;
}

/// Applies a move sequence without keeping undo state.
inline void replay(Configuration& config, const std::vector<Move>& moves) {
  for (const Move& m : moves) (void)config.apply(m);
}

}  // namespace circloop
