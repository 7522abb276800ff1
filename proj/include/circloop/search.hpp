#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "circloop/moves.hpp"
#include "circloop/rng.hpp"

namespace circloop {

/// Outcome of one planning run. `moves` is the canonical diff from the
/// default configuration (closure slots only, ordered by owner and slot);
/// replaying it on a fresh configuration reproduces `evaluation` exactly.
struct SearchResult {
  std::string algorithm;
  uint64_t seed = 0;
  std::vector<Move> moves;
  Evaluation evaluation;
  uint64_t nodes = 0;  ///< number of configuration evaluations
  double wall_ms = 0.0;
};

struct ExhaustiveParams {
  uint64_t cap = 1'000'000;  ///< refuse state spaces larger than this
};

struct GreedyParams {
  int max_steps = 10'000;
};

struct BeamParams {
  int width = 8;
};

struct MctsParams {
  double exploration = 1.4;
  int rollout_depth = -1;  ///< -1: number of mutable closure slots
  int budget = 1000;       ///< iterations
  uint64_t seed = 0;
};

struct SearchOptions {
  bool audit = false;  ///< re-derive all caches from scratch after every apply/undo
};

namespace detail {

/// Eligible suppliers for a slot: the default supplier's feature class
/// filtered by the level rule, ascending, default included.
inline std::vector<int> slot_choices(const Economy& eco, int owner, int slot) {
  const auto& spec = eco.products[owner];
  std::vector<int> out;
  for (int member : eco.class_members(eco.feature_class(spec.inputs[slot].default_supplier)))
    if (eco.products[member].level < spec.level) out.push_back(member);
  return out;
}

/// Best candidate seen so far, ranked by evaluation and then by the
/// lexicographically smallest canonical move list.
struct BestTracker {
  bool has = false;
  Evaluation eval;
  std::vector<Move> moves;

  void consider(const PlanContext& ctx, Configuration& cfg, const Evaluation& ev) {
    if (has) {
      int cmp = compare_eval(ev, eval);
      if (cmp > 0) return;
      if (cmp == 0) {
        std::vector<Move> cand = moves_from_default(ctx, cfg);
        if (compare_move_lists(cand, moves) < 0) {
          eval = ev;
          moves = std::move(cand);
        }
        return;
      }
    }
    has = true;
    eval = ev;
    moves = moves_from_default(ctx, cfg);
  }
};

/// Re-derives the reported evaluation by replaying the winner's move list on
/// a pristine configuration, so the published numbers never depend on the
/// search's internal patch history.
inline SearchResult finish(const PlanContext& ctx, std::string algorithm, uint64_t seed,
                           std::vector<Move> moves, uint64_t nodes,
                           std::chrono::steady_clock::time_point t0) {
  Configuration cfg(*ctx.eco);
  replay(cfg, moves);
  SearchResult res;
  res.algorithm = std::move(algorithm);
  res.seed = seed;
  res.moves = moves_from_default(ctx, cfg);
  res.evaluation = evaluate(ctx, cfg);
  res.nodes = nodes;
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace detail

/// Depth-first enumeration of every assignment of the (dynamically)
/// reachable slots, processing products from the demand downward so that a
/// product's relevance is settled before its own slots are branched on.
/// Globally optimal under the evaluate ordering; the reference the other
/// algorithms are judged against.
inline SearchResult search_exhaustive(const PlanContext& ctx, ExhaustiveParams params = {},
                                      SearchOptions options = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Economy& eco = *ctx.eco;
  Configuration cfg(eco);
  cfg.set_audit(options.audit);

  // decision slots and their choices are configuration independent
  const int k = eco.product_count();
  std::vector<std::vector<int>> decision_slots(k);
  std::vector<std::vector<std::vector<int>>> choices(k);
  for (int pid = 0; pid < k; ++pid) {
    const auto& spec = eco.products[pid];
    choices[pid].resize(spec.inputs.size());
    for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s) {
      choices[pid][s] = detail::slot_choices(eco, pid, s);
      if (choices[pid][s].size() > 1) decision_slots[pid].push_back(s);
    }
  }

  // demand first: order products by descending level, ascending id
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (eco.products[a].level != eco.products[b].level)
      return eco.products[a].level > eco.products[b].level;
    return a < b;
  });

  // guard: the default closure already bounds the branching product
  {
    double space = 1.0;
    for (int pid : cfg.demand_closure(ctx.demand))
      for (int s : decision_slots[pid]) space *= static_cast<double>(choices[pid][s].size());
    if (space > static_cast<double>(params.cap))
      throw std::runtime_error("state space exceeds cap (" + std::to_string(params.cap) + ")");
  }

  uint64_t nodes = 0;
  detail::BestTracker best;

  auto in_closure = [&](int pid) {
    return cfg.production_units(ctx.demand)[pid] > 0.0;
  };

  auto leaf = [&]() {
    if (++nodes > params.cap)
      throw std::runtime_error("state space exceeds cap (" + std::to_string(params.cap) + ")");
    Evaluation ev = evaluate(ctx, cfg);
    best.consider(ctx, cfg, ev);
  };

  auto rec = [&](auto&& self, size_t pos) -> void {
    if (pos == order.size()) {
      leaf();
      return;
    }
    const int pid = order[pos];
    if (decision_slots[pid].empty() || !in_closure(pid)) {
      self(self, pos + 1);
      return;
    }
    auto slots_rec = [&](auto&& slots_self, size_t di) -> void {
      if (di == decision_slots[pid].size()) {
        self(self, pos + 1);
        return;
      }
      const int s = decision_slots[pid][di];
      const int cur = cfg.chosen(pid, s);
      for (int y : choices[pid][s]) {
        if (y == cur) {
          slots_self(slots_self, di + 1);
        } else {
          UndoToken tok = cfg.apply({pid, s, cur, y});
          slots_self(slots_self, di + 1);
          cfg.undo(std::move(tok));
        }
      }
    };
    slots_rec(slots_rec, 0);
  };
  rec(rec, 0);

  return detail::finish(ctx, "exhaustive", 0, std::move(best.moves), nodes, t0);
}

/// Steepest-descent baseline: applies the single best strictly improving
/// move until none exists or `max_steps` moves were taken.
inline SearchResult search_greedy(const PlanContext& ctx, GreedyParams params = {},
                                  SearchOptions options = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Configuration cfg(*ctx.eco);
  cfg.set_audit(options.audit);

  uint64_t nodes = 1;
  Evaluation current = evaluate(ctx, cfg);
  for (int step = 0; step < params.max_steps; ++step) {
    bool found = false;
    Move best_move;
    Evaluation best_eval;
    for (const Move& m : legal_moves(ctx, cfg)) {
      UndoToken tok = cfg.apply(m);
      Evaluation ev = evaluate(ctx, cfg);
      ++nodes;
      cfg.undo(std::move(tok));
      if (!found || compare_eval(ev, best_eval) < 0) {  // first wins ties: smallest move
        found = true;
        best_move = m;
        best_eval = ev;
      }
    }
    if (!found || compare_eval(best_eval, current) >= 0) break;
    (void)cfg.apply(best_move);
    current = best_eval;
  }
  return detail::finish(ctx, "greedy", 0, moves_from_default(ctx, cfg), nodes, t0);
}

/// Beam search over partial assignments. Slots of every product reachable
/// under some assignment are processed suppliers first (ascending level);
/// after each slot only the `width` best states survive. Every evaluated
/// state is a complete configuration, so the best state ever seen is
/// returned even if it was later truncated.
inline SearchResult search_beam(const PlanContext& ctx, BeamParams params,
                                SearchOptions options = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (params.width < 1) throw std::invalid_argument("beam width must be >= 1");
  const Economy& eco = *ctx.eco;
  Configuration cfg(eco);
  cfg.set_audit(options.audit);

  // products reachable under *some* assignment: follow every eligible choice
  std::vector<uint8_t> may_reach(eco.product_count(), 0);
  {
    std::vector<int> queue;
    for (const auto& [pid, units] : ctx.demand.entries())
      if (units > 0.0 && !may_reach[pid]) {
        may_reach[pid] = 1;
        queue.push_back(pid);
      }
    for (size_t head = 0; head < queue.size(); ++head) {
      const auto& spec = eco.products[queue[head]];
      for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s)
        if (spec.inputs[s].quantity > 0.0)
          for (int y : detail::slot_choices(eco, queue[head], s))
            if (!may_reach[y]) {
              may_reach[y] = 1;
              queue.push_back(y);
            }
    }
  }

  struct SlotRef {
    int owner;
    int slot;
  };
  std::vector<SlotRef> slots;
  for (int pid : cfg.products_by_level_asc()) {
    if (!may_reach[pid]) continue;
    const auto& spec = eco.products[pid];
    for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s)
      if (detail::slot_choices(eco, pid, s).size() > 1) slots.push_back({pid, s});
  }

  struct State {
    std::vector<std::pair<std::pair<int, int>, int>> diff;  // (owner, slot) -> supplier
    Evaluation eval;
    std::vector<Move> moves;
  };

  uint64_t nodes = 0;
  detail::BestTracker best;

  auto eval_diff = [&](const std::vector<std::pair<std::pair<int, int>, int>>& diff) {
    std::vector<UndoToken> toks;
    toks.reserve(diff.size());
    for (const auto& [key, supplier] : diff)
      toks.push_back(cfg.apply({key.first, key.second, cfg.chosen(key.first, key.second), supplier}));
    State st;
    st.diff = diff;
    st.eval = evaluate(ctx, cfg);
    ++nodes;
    st.moves = moves_from_default(ctx, cfg);
    best.consider(ctx, cfg, st.eval);
    while (!toks.empty()) {
      cfg.undo(std::move(toks.back()));
      toks.pop_back();
    }
    return st;
  };

  std::vector<State> beam;
  beam.push_back(eval_diff({}));

  auto rank = [](const State& a, const State& b) {
    int cmp = compare_eval(a.eval, b.eval);
    if (cmp != 0) return cmp < 0;
    cmp = compare_move_lists(a.moves, b.moves);
    if (cmp != 0) return cmp < 0;
    return a.diff < b.diff;
  };

  for (const SlotRef& ref : slots) {
    const auto choices = detail::slot_choices(eco, ref.owner, ref.slot);
    const int dflt = eco.products[ref.owner].inputs[ref.slot].default_supplier;
    std::vector<State> next;
    next.reserve(beam.size() * choices.size());
    for (State& st : beam) {
      for (int y : choices) {
        if (y == dflt) continue;
        auto diff = st.diff;
        diff.emplace_back(std::make_pair(ref.owner, ref.slot), y);
        std::sort(diff.begin(), diff.end());
        next.push_back(eval_diff(diff));
      }
      next.push_back(std::move(st));  // keeping the default needs no re-evaluation
    }
    std::sort(next.begin(), next.end(), rank);
    if (static_cast<int>(next.size()) > params.width) next.resize(params.width);
    beam = std::move(next);
  }

  return detail::finish(ctx, "beam", 0, std::move(best.moves), nodes, t0);
}

namespace detail {

/// Rollout value: monotone decreasing in the normalized score, with
/// feasible states strictly above every infeasible one. Feasible maps into
/// (1, 2], infeasible into (0, 1).
inline double rollout_value(const Evaluation& ev, double norm) {
  const double s = std::max(0.0, ev.score / norm);
  if (ev.feasible()) return 1.0 + 1.0 / (1.0 + s);
  return 1.0 / (1.0 + s + ev.total_violation / norm);
}

struct MctsRun {
  BestTracker best;
  uint64_t nodes = 0;
};

inline MctsRun mcts_single(const PlanContext& ctx, const MctsParams& params, int rollout_depth,
                           uint64_t seed, bool audit) {
  const Economy& eco = *ctx.eco;
  Configuration cfg(eco);
  cfg.set_audit(audit);
  std::mt19937_64 rng(seed);

  MctsRun run;
  Evaluation root_eval = evaluate(ctx, cfg);
  ++run.nodes;
  run.best.consider(ctx, cfg, root_eval);
  const double norm = root_eval.score > 0.0 ? root_eval.score : 1.0;

  struct Node {
    std::vector<Move> untried;
    std::vector<std::pair<Move, int>> children;
    int visits = 0;
    double value_sum = 0.0;
    bool initialized = false;
  };
  std::vector<Node> tree(1);
  tree[0].untried = legal_moves(ctx, cfg);
  tree[0].initialized = true;

  std::vector<UndoToken> toks;
  std::vector<int> path;
  for (int iter = 0; iter < params.budget; ++iter) {
    path.assign(1, 0);
    int node = 0;

    // selection: UCT descent through fully expanded nodes
    while (tree[node].initialized && tree[node].untried.empty() && !tree[node].children.empty()) {
      const double log_n = std::log(static_cast<double>(std::max(1, tree[node].visits)));
      int pick = -1;
      double pick_ucb = 0.0;
      for (size_t i = 0; i < tree[node].children.size(); ++i) {
        const Node& ch = tree[tree[node].children[i].second];
        double ucb = ch.value_sum / ch.visits +
                     params.exploration * std::sqrt(log_n / ch.visits);
        if (pick < 0 || ucb > pick_ucb) {
          pick = static_cast<int>(i);
          pick_ucb = ucb;
        }
      }
      toks.push_back(cfg.apply(tree[node].children[pick].first));
      node = tree[node].children[pick].second;
      path.push_back(node);
    }

    if (!tree[node].initialized) {
      tree[node].untried = legal_moves(ctx, cfg);
      tree[node].initialized = true;
    }

    // expansion: one random untried move becomes a child
    if (!tree[node].untried.empty()) {
      auto& untried = tree[node].untried;
      const size_t i = uniform_index(rng, untried.size());
      Move m = untried[i];
      untried[i] = untried.back();
      untried.pop_back();
      toks.push_back(cfg.apply(m));
      tree.push_back({});
      const int child = static_cast<int>(tree.size()) - 1;
      tree[node].children.emplace_back(m, child);
      node = child;
      path.push_back(node);
    }

    Evaluation ev = evaluate(ctx, cfg);
    ++run.nodes;
    run.best.consider(ctx, cfg, ev);

    // rollout: uniformly random legal moves to the depth limit
    for (int d = 0; d < rollout_depth; ++d) {
      std::vector<Move> ms = legal_moves(ctx, cfg);
      if (ms.empty()) break;
      toks.push_back(cfg.apply(ms[uniform_index(rng, ms.size())]));
      ev = evaluate(ctx, cfg);
      ++run.nodes;
      run.best.consider(ctx, cfg, ev);
    }

    const double value = rollout_value(ev, norm);
    for (int n : path) {
      ++tree[n].visits;
      tree[n].value_sum += value;
    }
    while (!toks.empty()) {
      cfg.undo(std::move(toks.back()));
      toks.pop_back();
    }
  }
  return run;
}

}  // namespace detail

/// Single-player UCT over the configuration lattice. Nodes are
/// configurations, edges legal moves, rollouts uniformly random; the best
/// configuration ever visited is returned (visit counts say nothing about
/// quality in a one-player argmin). Deterministic given the seed. With
/// `workers` > 1 independent trees run root-parallel on seeds
/// seed+0..seed+workers-1; the best merged result wins, ties to the lowest
/// worker index.
inline SearchResult search_mcts(const PlanContext& ctx, MctsParams params, int workers = 1,
                                SearchOptions options = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (params.budget < 1) throw std::invalid_argument("mcts budget must be >= 1");
  if (params.exploration < 0.0) throw std::invalid_argument("mcts exploration must be >= 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");

  int rollout_depth = params.rollout_depth;
  if (rollout_depth < 0) {
    rollout_depth = 0;
    Configuration dflt(*ctx.eco);
    for (int pid : dflt.demand_closure(ctx.demand)) {
      const auto& spec = ctx.eco->products[pid];
      for (int s = 0; s < static_cast<int>(spec.inputs.size()); ++s)
        if (detail::slot_choices(*ctx.eco, pid, s).size() > 1) ++rollout_depth;
    }
  }

  std::vector<detail::MctsRun> runs(workers);
  if (workers == 1) {
    runs[0] = detail::mcts_single(ctx, params, rollout_depth, params.seed, options.audit);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        runs[w] = detail::mcts_single(ctx, params, rollout_depth, params.seed + w, options.audit);
      });
    for (auto& th : pool) th.join();
  }

  int winner = 0;
  uint64_t nodes = 0;
  for (int w = 0; w < workers; ++w) {
    nodes += runs[w].nodes;
    if (w > 0 && compare_eval(runs[w].best.eval, runs[winner].best.eval) < 0) winner = w;
  }
  return detail::finish(ctx, "mcts", params.seed, std::move(runs[winner].best.moves), nodes, t0);
}

}  // namespace circloop
