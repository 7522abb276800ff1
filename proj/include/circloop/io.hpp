#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "circloop/rng.hpp"
#include "circloop/search.hpp"

namespace circloop {

using ordered_json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "circloop/1";

/// FNV-1a over the canonical serialized economy; pairs plan results with the
/// economy they were computed from.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// %.9g rendering shared by the CSV tables.
inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

inline bool want(const ordered_json& v, std::string_view type, const std::string& where,
                 std::vector<Diagnostic>& diags) {
  bool ok = false;
  if (type == "object") ok = v.is_object();
  else if (type == "array") ok = v.is_array();
  else if (type == "string") ok = v.is_string();
  else if (type == "number") ok = v.is_number();
  else if (type == "integer") ok = v.is_number_integer();
  else if (type == "boolean") ok = v.is_boolean();
  if (!ok) diags.push_back({where, "expected " + std::string(type)});
  return ok;
}

inline const ordered_json* field(const ordered_json& obj, const char* key, const char* type,
                                 const std::string& where, std::vector<Diagnostic>& diags,
                                 bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) diags.push_back({where, std::string("missing field '") + key + "'"});
    return nullptr;
  }
  if (!want(*it, type, where + "." + key, diags)) return nullptr;
  return &*it;
}

}  // namespace detail

// ---- economy documents ------------------------------------------------------

struct EconomyParse {
  std::optional<Economy> economy;
  std::vector<Diagnostic> diagnostics;
  bool parse_error = false;  ///< malformed document, as opposed to validation findings
};

/// Parses and validates an economy document. Either a fully valid, finalized
/// Economy comes back or a non-empty list of diagnostics; never a partially
/// valid one. References are by name in the document and resolved to dense
/// ids by array position. For a level-0 product the single input names the
/// wrapped raw material; all other suppliers name products.
inline EconomyParse parse_economy(const std::string& text) {
  EconomyParse out;
  auto& diags = out.diagnostics;

  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    out.parse_error = true;
    diags.push_back({"", std::string("malformed JSON: ") + e.what()});
    return out;
  }
  if (!detail::want(doc, "object", "$", diags)) {
    out.parse_error = true;
    return out;
  }
  const auto* version = detail::field(doc, "schema_version", "string", "$", diags);
  const auto* materials = detail::field(doc, "raw_materials", "array", "$", diags);
  const auto* products = detail::field(doc, "products", "array", "$", diags);
  if (!version || !materials || !products) {
    out.parse_error = true;
    return out;
  }
  if (version->get<std::string>() != kSchemaVersion) {
    out.parse_error = true;
    diags.push_back({"$.schema_version",
                     "unknown schema version '" + version->get<std::string>() + "'"});
    return out;
  }

  Economy eco;
  // structural pass; supplier and byproduct names are resolved afterwards
  struct PendingInput {
    int product;
    int slot;
    std::string supplier;
    double quantity;
  };
  struct PendingByproduct {
    int product;
    std::string material;
    double quantity;
  };
  std::vector<PendingInput> pending_inputs;
  std::vector<PendingByproduct> pending_byproducts;

  for (size_t i = 0; i < materials->size(); ++i) {
    const std::string where = "raw_materials[" + std::to_string(i) + "]";
    const auto& m = (*materials)[i];
    if (!detail::want(m, "object", where, diags)) continue;
    RawMaterial raw;
    if (const auto* v = detail::field(m, "name", "string", where, diags)) raw.name = v->get<std::string>();
    if (const auto* v = detail::field(m, "unit", "string", where, diags)) raw.unit = v->get<std::string>();
    if (const auto* v = detail::field(m, "base_time", "number", where, diags)) raw.base_time = v->get<double>();
    if (const auto* v = detail::field(m, "base_climate", "number", where, diags)) raw.base_climate = v->get<double>();
    eco.raw_materials.push_back(std::move(raw));
  }

  for (size_t i = 0; i < products->size(); ++i) {
    const std::string where = "products[" + std::to_string(i) + "]";
    const auto& p = (*products)[i];
    if (!detail::want(p, "object", where, diags)) continue;
    ProductSpec spec;
    if (const auto* v = detail::field(p, "name", "string", where, diags)) spec.name = v->get<std::string>();
    if (const auto* v = detail::field(p, "level", "integer", where, diags)) spec.level = v->get<int>();
    if (const auto* v = detail::field(p, "features", "array", where, diags))
      for (size_t f = 0; f < v->size(); ++f)
        if (detail::want((*v)[f], "string", where + ".features[" + std::to_string(f) + "]", diags))
          spec.features.push_back((*v)[f].get<std::string>());
    if (const auto* v = detail::field(p, "inputs", "array", where, diags))
      for (size_t s = 0; s < v->size(); ++s) {
        const std::string iwhere = where + ".inputs[" + std::to_string(s) + "]";
        if (!detail::want((*v)[s], "object", iwhere, diags)) continue;
        const auto* q = detail::field((*v)[s], "quantity", "number", iwhere, diags);
        const auto* sup = detail::field((*v)[s], "supplier", "string", iwhere, diags);
        if (q && sup)
          pending_inputs.push_back({static_cast<int>(i), static_cast<int>(s),
                                    sup->get<std::string>(), q->get<double>()});
      }
    if (const auto* v = detail::field(p, "byproducts", "array", where, diags, false))
      for (size_t b = 0; b < v->size(); ++b) {
        const std::string bwhere = where + ".byproducts[" + std::to_string(b) + "]";
        if (!detail::want((*v)[b], "object", bwhere, diags)) continue;
        const auto* mat = detail::field((*v)[b], "material", "string", bwhere, diags);
        const auto* q = detail::field((*v)[b], "quantity", "number", bwhere, diags);
        if (mat && q)
          pending_byproducts.push_back({static_cast<int>(i), mat->get<std::string>(), q->get<double>()});
      }
    if (const auto* v = detail::field(p, "overhead", "object", where, diags, false)) {
      if (const auto* t = detail::field(*v, "time", "number", where + ".overhead", diags))
        spec.direct_overhead.time = t->get<double>();
      if (const auto* c = detail::field(*v, "climate", "number", where + ".overhead", diags))
        spec.direct_overhead.climate = c->get<double>();
    }
    eco.products.push_back(std::move(spec));
  }
  if (!diags.empty()) {
    out.parse_error = true;
    return out;
  }

  // resolution pass: names to dense ids (first occurrence wins; duplicates
  // are reported by validate)
  std::unordered_map<std::string, int> material_ids, product_ids;
  for (size_t i = 0; i < eco.raw_materials.size(); ++i)
    material_ids.emplace(eco.raw_materials[i].name, static_cast<int>(i));
  for (size_t i = 0; i < eco.products.size(); ++i)
    product_ids.emplace(eco.products[i].name, static_cast<int>(i));

  std::vector<std::vector<PendingInput>> by_product(eco.products.size());
  for (auto& pi : pending_inputs) by_product[pi.product].push_back(pi);

  for (size_t i = 0; i < eco.products.size(); ++i) {
    auto& spec = eco.products[i];
    const std::string where = "products[" + std::to_string(i) + "]";
    const auto& ins = by_product[i];
    if (spec.level == 0) {
      // raw wrapper: exactly one input of quantity 1 naming a material
      auto mat = ins.size() == 1 ? material_ids.find(ins[0].supplier) : material_ids.end();
      if (ins.size() != 1 || mat == material_ids.end() ||
          std::fabs(ins[0].quantity - 1.0) > kImpactTolerance) {
        diags.push_back({where, "product " + spec.name + ": level-0 must wrap exactly one raw material"});
      } else {
        spec.wrapped_material = mat->second;
      }
    } else {
      for (const auto& pi : ins) {
        auto it = product_ids.find(pi.supplier);
        if (it == product_ids.end()) {
          diags.push_back({where, "product " + spec.name + ": unknown supplier '" + pi.supplier + "'"});
          continue;
        }
        spec.inputs.push_back({pi.slot, pi.quantity, it->second});
      }
    }
  }
  for (const auto& pb : pending_byproducts) {
    auto it = material_ids.find(pb.material);
    if (it == material_ids.end()) {
      diags.push_back({"products[" + std::to_string(pb.product) + "]",
                       "product " + eco.products[pb.product].name + ": unknown byproduct material '" +
                           pb.material + "'"});
      continue;
    }
    eco.products[pb.product].byproducts.push_back({it->second, pb.quantity});
  }
  if (!diags.empty()) return out;

  auto found = validate(eco);
  diags.insert(diags.end(), found.begin(), found.end());
  if (!diags.empty()) return out;

  eco.finalize();
  out.economy = std::move(eco);
  return out;
}

/// Canonical document form of an economy; field order is fixed so the output
/// is byte-stable.
inline ordered_json economy_to_json(const Economy& eco) {
  ordered_json doc;
  doc["schema_version"] = std::string(kSchemaVersion);
  doc["raw_materials"] = ordered_json::array();
  for (const auto& m : eco.raw_materials) {
    ordered_json jm;
    jm["name"] = m.name;
    jm["unit"] = m.unit;
    jm["base_time"] = m.base_time;
    jm["base_climate"] = m.base_climate;
    doc["raw_materials"].push_back(std::move(jm));
  }
  doc["products"] = ordered_json::array();
  for (const auto& p : eco.products) {
    ordered_json jp;
    jp["name"] = p.name;
    jp["level"] = p.level;
    jp["features"] = p.features;
    jp["inputs"] = ordered_json::array();
    if (p.level == 0) {
      ordered_json ji;
      ji["quantity"] = 1.0;
      ji["supplier"] = eco.raw_materials[p.wrapped_material].name;
      jp["inputs"].push_back(std::move(ji));
    } else {
      for (const auto& in : p.inputs) {
        ordered_json ji;
        ji["quantity"] = in.quantity;
        ji["supplier"] = eco.products[in.default_supplier].name;
        jp["inputs"].push_back(std::move(ji));
      }
    }
    jp["byproducts"] = ordered_json::array();
    for (const auto& b : p.byproducts) {
      ordered_json jb;
      jb["material"] = eco.raw_materials[b.material].name;
      jb["quantity"] = b.quantity;
      jp["byproducts"].push_back(std::move(jb));
    }
    jp["overhead"] = ordered_json{{"time", p.direct_overhead.time},
                                  {"climate", p.direct_overhead.climate}};
    doc["products"].push_back(std::move(jp));
  }
  return doc;
}

inline std::string serialize_economy(const Economy& eco) { return economy_to_json(eco).dump(2) + "\n"; }

inline std::string economy_hash(const Economy& eco) {
  return to_hex(fnv1a64(economy_to_json(eco).dump()));
}

// ---- plan documents -----------------------------------------------------------

struct PlanSpec {
  Demand demand;
  Weights weights;
  PlanetaryBounds bounds;
  std::string algorithm;  // exhaustive | greedy | beam | mcts
  ExhaustiveParams exhaustive;
  GreedyParams greedy;
  BeamParams beam;
  MctsParams mcts;
  uint64_t seed = 0;
  bool reuse_credit = false;
};

struct PlanParse {
  std::optional<PlanSpec> plan;
  std::vector<Diagnostic> diagnostics;
  bool parse_error = false;
};

/// Parses a plan document against an economy: demand, weights, bounds,
/// algorithm selection and parameters. Unlisted weights default to 1,
/// unlisted caps to unbounded.
inline PlanParse parse_plan(const std::string& text, const Economy& eco) {
  PlanParse out;
  auto& diags = out.diagnostics;

  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    out.parse_error = true;
    diags.push_back({"", std::string("malformed JSON: ") + e.what()});
    return out;
  }
  if (!detail::want(doc, "object", "$", diags)) {
    out.parse_error = true;
    return out;
  }

  std::vector<std::pair<int, double>> demand_entries;
  if (const auto* v = detail::field(doc, "demand", "array", "$", diags)) {
    for (size_t i = 0; i < v->size(); ++i) {
      const std::string where = "demand[" + std::to_string(i) + "]";
      if (!detail::want((*v)[i], "object", where, diags)) continue;
      const auto* name = detail::field((*v)[i], "product", "string", where, diags);
      const auto* units = detail::field((*v)[i], "units", "number", where, diags);
      if (!name || !units) continue;
      int pid = eco.find_product(name->get<std::string>());
      if (pid < 0) {
        diags.push_back({where, "unknown product '" + name->get<std::string>() + "'"});
        continue;
      }
      demand_entries.emplace_back(pid, units->get<double>());
    }
  }

  Weights weights = Weights::ones(eco.material_count());
  if (const auto* v = detail::field(doc, "weights", "object", "$", diags, false)) {
    if (const auto* t = detail::field(*v, "time", "number", "$.weights", diags, false))
      weights.time = t->get<double>();
    if (const auto* c = detail::field(*v, "climate", "number", "$.weights", diags, false))
      weights.climate = c->get<double>();
    if (const auto* m = detail::field(*v, "materials", "object", "$.weights", diags, false))
      for (auto it = m->begin(); it != m->end(); ++it) {
        int mid = eco.find_material(it.key());
        if (mid < 0) {
          diags.push_back({"$.weights.materials", "unknown material '" + it.key() + "'"});
          continue;
        }
        if (detail::want(it.value(), "number", "$.weights.materials." + it.key(), diags))
          weights.materials[mid] = it.value().get<double>();
      }
  }

  PlanetaryBounds bounds;
  bounds.max_materials.assign(eco.material_count(), std::nullopt);
  if (const auto* v = detail::field(doc, "bounds", "object", "$", diags, false)) {
    if (const auto* t = detail::field(*v, "max_time", "number", "$.bounds", diags, false))
      bounds.max_time = t->get<double>();
    if (const auto* c = detail::field(*v, "max_climate", "number", "$.bounds", diags, false))
      bounds.max_climate = c->get<double>();
    if (const auto* m = detail::field(*v, "max_materials", "object", "$.bounds", diags, false))
      for (auto it = m->begin(); it != m->end(); ++it) {
        int mid = eco.find_material(it.key());
        if (mid < 0) {
          diags.push_back({"$.bounds.max_materials", "unknown material '" + it.key() + "'"});
          continue;
        }
        if (detail::want(it.value(), "number", "$.bounds.max_materials." + it.key(), diags))
          bounds.max_materials[mid] = it.value().get<double>();
      }
  }

  std::string algorithm;
  if (const auto* v = detail::field(doc, "algorithm", "string", "$", diags))
    algorithm = v->get<std::string>();
  if (!algorithm.empty() && algorithm != "exhaustive" && algorithm != "greedy" &&
      algorithm != "beam" && algorithm != "mcts")
    diags.push_back({"$.algorithm", "unknown algorithm '" + algorithm + "'"});

  ExhaustiveParams exhaustive;
  GreedyParams greedy;
  BeamParams beam;
  MctsParams mcts;
  if (const auto* v = detail::field(doc, "params", "object", "$", diags, false)) {
    if (const auto* p = detail::field(*v, "cap", "integer", "$.params", diags, false))
      exhaustive.cap = p->get<uint64_t>();
    if (const auto* p = detail::field(*v, "max_steps", "integer", "$.params", diags, false))
      greedy.max_steps = p->get<int>();
    if (const auto* p = detail::field(*v, "width", "integer", "$.params", diags, false))
      beam.width = p->get<int>();
    if (const auto* p = detail::field(*v, "budget", "integer", "$.params", diags, false))
      mcts.budget = p->get<int>();
    if (const auto* p = detail::field(*v, "exploration", "number", "$.params", diags, false))
      mcts.exploration = p->get<double>();
    if (const auto* p = detail::field(*v, "rollout_depth", "integer", "$.params", diags, false))
      mcts.rollout_depth = p->get<int>();
  }

  uint64_t seed = 0;
  if (const auto* v = detail::field(doc, "seed", "integer", "$", diags, false))
    seed = v->get<uint64_t>();
  bool reuse_credit = false;
  if (const auto* v = detail::field(doc, "reuse_credit", "boolean", "$", diags, false))
    reuse_credit = v->get<bool>();

  if (!diags.empty()) return out;

  try {
    Demand demand(eco, std::move(demand_entries));
    weights.check(eco.material_count());
    bounds.check(eco.material_count());
    mcts.seed = seed;
    out.plan = PlanSpec{std::move(demand), std::move(weights), std::move(bounds),
                        std::move(algorithm), exhaustive, greedy, beam, mcts, seed, reuse_credit};
  } catch (const std::invalid_argument& e) {
    diags.push_back({"$", e.what()});
  }
  return out;
}

/// Canonical echo of a plan, embedded into result documents so reports are
/// self contained.
inline ordered_json plan_to_json(const Economy& eco, const PlanSpec& plan) {
  ordered_json doc;
  doc["demand"] = ordered_json::array();
  for (const auto& [pid, units] : plan.demand.entries()) {
    ordered_json je;
    je["product"] = eco.products[pid].name;
    je["units"] = units;
    doc["demand"].push_back(std::move(je));
  }
  doc["weights"] = ordered_json::object();
  doc["weights"]["time"] = plan.weights.time;
  doc["weights"]["climate"] = plan.weights.climate;
  doc["weights"]["materials"] = ordered_json::object();
  for (int i = 0; i < eco.material_count(); ++i)
    doc["weights"]["materials"][eco.raw_materials[i].name] = plan.weights.materials[i];
  doc["bounds"] = ordered_json::object();
  if (plan.bounds.max_time) doc["bounds"]["max_time"] = *plan.bounds.max_time;
  if (plan.bounds.max_climate) doc["bounds"]["max_climate"] = *plan.bounds.max_climate;
  ordered_json caps = ordered_json::object();
  for (int i = 0; i < eco.material_count(); ++i)
    if (i < static_cast<int>(plan.bounds.max_materials.size()) && plan.bounds.max_materials[i])
      caps[eco.raw_materials[i].name] = *plan.bounds.max_materials[i];
  doc["bounds"]["max_materials"] = std::move(caps);
  doc["algorithm"] = plan.algorithm;
  ordered_json params = ordered_json::object();
  if (plan.algorithm == "exhaustive") params["cap"] = plan.exhaustive.cap;
  if (plan.algorithm == "greedy") params["max_steps"] = plan.greedy.max_steps;
  if (plan.algorithm == "beam") params["width"] = plan.beam.width;
  if (plan.algorithm == "mcts") {
    params["budget"] = plan.mcts.budget;
    params["exploration"] = plan.mcts.exploration;
    params["rollout_depth"] = plan.mcts.rollout_depth;
  }
  doc["params"] = std::move(params);
  doc["seed"] = plan.seed;
  doc["reuse_credit"] = plan.reuse_credit;
  return doc;
}

// ---- planning runs --------------------------------------------------------------

struct PlanOutcome {
  SearchResult result;
  double circularity = 0.0;
};

/// Dispatches the plan's algorithm and computes the winner's circularity.
inline PlanOutcome run_plan(const Economy& eco, const PlanSpec& plan, bool audit = false,
                            int workers = 1) {
  PlanContext ctx(eco, plan.demand, plan.weights, plan.bounds, plan.reuse_credit);
  SearchOptions options{audit};
  SearchResult res;
  if (plan.algorithm == "exhaustive") res = search_exhaustive(ctx, plan.exhaustive, options);
  else if (plan.algorithm == "greedy") res = search_greedy(ctx, plan.greedy, options);
  else if (plan.algorithm == "beam") res = search_beam(ctx, plan.beam, options);
  else if (plan.algorithm == "mcts") res = search_mcts(ctx, plan.mcts, workers, options);
  else throw std::invalid_argument("unknown algorithm '" + plan.algorithm + "'");
  res.seed = plan.seed;

  Configuration cfg(eco);
  replay(cfg, res.moves);
  PlanOutcome out;
  out.result = std::move(res);
  out.circularity = reuse_match(cfg, plan.demand).circularity;
  return out;
}

/// Result document. Wall time is the single nondeterministic field and sits
/// last under its own key so byte comparisons can mask it.
inline ordered_json result_to_json(const Economy& eco, const PlanSpec& plan,
                                   const PlanOutcome& outcome) {
  const SearchResult& res = outcome.result;
  ordered_json doc;
  doc["algorithm"] = res.algorithm;
  doc["seed"] = res.seed;
  doc["economy_hash"] = economy_hash(eco);
  doc["plan"] = plan_to_json(eco, plan);
  doc["moves"] = ordered_json::array();
  for (const Move& m : res.moves) {
    ordered_json jm;
    jm["owner"] = eco.products[m.owner].name;
    jm["slot"] = m.slot;
    jm["from"] = eco.products[m.from].name;
    jm["to"] = eco.products[m.to].name;
    doc["moves"].push_back(std::move(jm));
  }
  doc["impact"] = ordered_json::object();
  doc["impact"]["time"] = res.evaluation.impact.time;
  doc["impact"]["climate"] = res.evaluation.impact.climate;
  doc["impact"]["materials"] = res.evaluation.impact.materials;
  doc["score"] = res.evaluation.score;
  doc["feasible"] = res.evaluation.feasible();
  doc["violations"] = ordered_json::array();
  for (const auto& v : res.evaluation.feasibility.violations) {
    ordered_json jv;
    jv["indicator"] = v.indicator;
    jv["value"] = v.value;
    jv["bound"] = v.bound;
    jv["excess"] = v.excess;
    doc["violations"].push_back(std::move(jv));
  }
  doc["total_violation"] = res.evaluation.total_violation;
  doc["circularity"] = outcome.circularity;
  doc["nodes"] = res.nodes;
  doc["wall_time_ms"] = res.wall_ms;
  return doc;
}

struct ResultDoc {
  std::string algorithm;
  uint64_t seed = 0;
  std::string economy_hash;
  PlanSpec plan;
  std::vector<Move> moves;
};

struct ResultParse {
  std::optional<ResultDoc> result;
  std::vector<Diagnostic> diagnostics;
  bool parse_error = false;
};

/// Reads back a result document for reporting: the embedded plan, the hash
/// and the move list. Move references resolve by name against `eco`.
inline ResultParse parse_result(const std::string& text, const Economy& eco) {
  ResultParse out;
  auto& diags = out.diagnostics;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    out.parse_error = true;
    diags.push_back({"", std::string("malformed JSON: ") + e.what()});
    return out;
  }
  if (!detail::want(doc, "object", "$", diags)) {
    out.parse_error = true;
    return out;
  }
  const auto* algorithm = detail::field(doc, "algorithm", "string", "$", diags);
  const auto* seed = detail::field(doc, "seed", "integer", "$", diags);
  const auto* hash = detail::field(doc, "economy_hash", "string", "$", diags);
  const auto* plan_doc = detail::field(doc, "plan", "object", "$", diags);
  const auto* moves = detail::field(doc, "moves", "array", "$", diags);
  if (!algorithm || !seed || !hash || !plan_doc || !moves) {
    out.parse_error = true;
    return out;
  }
  PlanParse plan = parse_plan(plan_doc->dump(), eco);
  if (!plan.plan) {
    out.parse_error = plan.parse_error;
    diags.insert(diags.end(), plan.diagnostics.begin(), plan.diagnostics.end());
    return out;
  }
  std::vector<Move> resolved;
  for (size_t i = 0; i < moves->size(); ++i) {
    const std::string where = "moves[" + std::to_string(i) + "]";
    if (!detail::want((*moves)[i], "object", where, diags)) continue;
    const auto* owner = detail::field((*moves)[i], "owner", "string", where, diags);
    const auto* slot = detail::field((*moves)[i], "slot", "integer", where, diags);
    const auto* from = detail::field((*moves)[i], "from", "string", where, diags);
    const auto* to = detail::field((*moves)[i], "to", "string", where, diags);
    if (!owner || !slot || !from || !to) continue;
    Move m;
    m.owner = eco.find_product(owner->get<std::string>());
    m.slot = slot->get<int>();
    m.from = eco.find_product(from->get<std::string>());
    m.to = eco.find_product(to->get<std::string>());
    if (m.owner < 0 || m.from < 0 || m.to < 0) {
      diags.push_back({where, "move references an unknown product"});
      continue;
    }
    resolved.push_back(m);
  }
  if (!diags.empty()) return out;
  out.result = ResultDoc{algorithm->get<std::string>(), seed->get<uint64_t>(),
                         hash->get<std::string>(), std::move(*plan.plan), std::move(resolved)};
  return out;
}

// ---- reports ----------------------------------------------------------------------

/// Three CSV tables for a finished plan: per-product impact rows, the
/// byproduct reuse balance, and the per-indicator cap check. Numbers render
/// with 9 significant digits; tables are separated by blank lines.
inline std::string render_report(const Economy& eco, const ResultDoc& result) {
  if (economy_hash(eco) != result.economy_hash)
    throw std::runtime_error("mismatched economy/result pair: schema hash differs");

  Configuration cfg(eco);
  replay(cfg, result.moves);
  const int r = eco.material_count();

  std::string out;
  out += "product,time,climate";
  for (int i = 0; i < r; ++i) out += ",material_" + std::to_string(i);
  out += "\n";
  for (int pid = 0; pid < eco.product_count(); ++pid) {
    LcaVector v = cfg.lca_product(pid);
    out += eco.products[pid].name + "," + format_g9(v.time) + "," + format_g9(v.climate);
    for (int i = 0; i < r; ++i) out += "," + format_g9(v.materials[i]);
    out += "\n";
  }

  out += "\nmaterial,gross,supply,reused,net\n";
  ReuseReport reuse = reuse_match(cfg, result.plan.demand);
  for (int i = 0; i < r; ++i) {
    if (reuse.supply[i] <= 0.0) continue;  // rows only for materials with byproduct supply
    out += eco.raw_materials[i].name + "," + format_g9(reuse.gross[i]) + "," +
           format_g9(reuse.supply[i]) + "," + format_g9(reuse.reused[i]) + "," +
           format_g9(reuse.net[i]) + "\n";
  }

  out += "\nindicator,value,cap,excess\n";
  PlanContext ctx(eco, result.plan.demand, result.plan.weights, result.plan.bounds,
                  result.plan.reuse_credit);
  Evaluation ev = evaluate(ctx, cfg);
  auto row = [&](const std::string& name, double value, const std::optional<double>& cap) {
    double excess = cap && value > *cap ? value - *cap : 0.0;
    out += name + "," + format_g9(value) + "," + (cap ? format_g9(*cap) : std::string("inf")) +
           "," + format_g9(excess) + "\n";
  };
  row("time", ev.impact.time, result.plan.bounds.max_time);
  row("climate", ev.impact.climate, result.plan.bounds.max_climate);
  for (int i = 0; i < r; ++i)
    row("material_" + std::to_string(i), ev.impact.materials[i],
        i < static_cast<int>(result.plan.bounds.max_materials.size())
            ? result.plan.bounds.max_materials[i]
            : std::nullopt);
  return out;
}

// ---- instance generator --------------------------------------------------------------

/// Shape of a generated random economy. One level-0 wrapper is emitted per
/// material; every level above draws its inputs from the level directly
/// below, so levels are strictly layered.
struct GenParams {
  uint64_t seed = 1;
  int materials = 4;
  int levels = 2;          ///< layers above the level-0 wrappers
  int per_level = 3;       ///< products per layer
  int class_size = 2;      ///< substitutes per feature class
  int max_inputs = 3;
  double byproduct_rate = 0.0;  ///< probability a product declares one byproduct

  void check() const {
    if (materials < 1 || levels < 0 || per_level < 1 || class_size < 1 || max_inputs < 1)
      throw std::invalid_argument("generator counts must be >= 1 (levels >= 0)");
    if (!(byproduct_rate >= 0.0 && byproduct_rate <= 1.0))
      throw std::invalid_argument("byproduct rate must be within [0, 1]");
  }
};

/// Deterministic random economy document. Quantities are drawn from
/// [0.5, 4.0] and base impacts from [0.1, 10.0]; every document produced
/// here parses and validates cleanly.
inline ordered_json generate_economy(const GenParams& params) {
  params.check();
  std::mt19937_64 rng(params.seed);

  ordered_json doc;
  doc["schema_version"] = std::string(kSchemaVersion);
  doc["raw_materials"] = ordered_json::array();
  for (int i = 0; i < params.materials; ++i) {
    ordered_json jm;
    jm["name"] = "m" + std::to_string(i);
    jm["unit"] = "kg";
    jm["base_time"] = uniform_real(rng, 0.1, 10.0);
    jm["base_climate"] = uniform_real(rng, 0.1, 10.0);
    doc["raw_materials"].push_back(std::move(jm));
  }

  doc["products"] = ordered_json::array();
  std::vector<std::string> below;  // names of the level directly below
  auto emit_byproducts = [&](ordered_json& jp) {
    jp["byproducts"] = ordered_json::array();
    if (params.byproduct_rate > 0.0 && uniform_real(rng, 0.0, 1.0) < params.byproduct_rate) {
      ordered_json jb;
      jb["material"] = "m" + std::to_string(uniform_index(rng, params.materials));
      jb["quantity"] = uniform_real(rng, 0.1, 1.0);
      jp["byproducts"].push_back(std::move(jb));
    }
  };

  for (int i = 0; i < params.materials; ++i) {
    ordered_json jp;
    jp["name"] = "w" + std::to_string(i);
    jp["level"] = 0;
    jp["features"] = {"f0_" + std::to_string(i / params.class_size)};
    jp["inputs"] = ordered_json::array();
    ordered_json ji;
    ji["quantity"] = 1.0;
    ji["supplier"] = "m" + std::to_string(i);
    jp["inputs"].push_back(std::move(ji));
    emit_byproducts(jp);
    jp["overhead"] = ordered_json{{"time", 0.0}, {"climate", 0.0}};
    doc["products"].push_back(std::move(jp));
    below.push_back("w" + std::to_string(i));
  }

  for (int lvl = 1; lvl <= params.levels; ++lvl) {
    std::vector<std::string> current;
    for (int i = 0; i < params.per_level; ++i) {
      const std::string name = "p" + std::to_string(lvl) + "_" + std::to_string(i);
      ordered_json jp;
      jp["name"] = name;
      jp["level"] = lvl;
      jp["features"] = {"f" + std::to_string(lvl) + "_" + std::to_string(i / params.class_size)};
      jp["inputs"] = ordered_json::array();
      const int n_inputs = uniform_int(rng, 1, params.max_inputs);
      for (int s = 0; s < n_inputs; ++s) {
        ordered_json ji;
        ji["quantity"] = uniform_real(rng, 0.5, 4.0);
        ji["supplier"] = below[uniform_index(rng, below.size())];
        jp["inputs"].push_back(std::move(ji));
      }
      emit_byproducts(jp);
      jp["overhead"] = ordered_json{{"time", 0.0}, {"climate", 0.0}};
      doc["products"].push_back(std::move(jp));
      current.push_back(name);
    }
    below = std::move(current);
  }
  return doc;
}

/// Generated economy as a ready-to-use model.
inline Economy generate_economy_model(const GenParams& params) {
  EconomyParse parsed = parse_economy(generate_economy(params).dump());
  if (!parsed.economy) throw std::logic_error("generator produced an invalid economy");
  return std::move(*parsed.economy);
}

}  // namespace circloop
