#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace circloop {

/// A reported problem with an economy or plan document. `where` is a
/// human-readable location such as "products[2]".
struct Diagnostic {
  std::string where;
  std::string message;

  std::string str() const { return where.empty() ? message : where + ": " + message; }
};

/// Level-0 seed of the product recursion. One unit extracted costs
/// `base_time` hours of labour and `base_climate` kgCO2e.
struct RawMaterial {
  int id = -1;
  std::string name;
  std::string unit = "kg";
  double base_time = 0.0;
  double base_climate = 0.0;

  friend bool operator==(const RawMaterial&, const RawMaterial&) = default;
};

/// One input position of a recipe: `quantity` units of the supplier are
/// consumed per unit of the parent product. Suppliers are rebindable at
/// plan time; `default_supplier` is the starting choice.
struct InputSlot {
  int slot_index = -1;
  double quantity = 0.0;
  int default_supplier = -1;  ///< product id

  friend bool operator==(const InputSlot&, const InputSlot&) = default;
};

/// Waste stream released per unit of product, reusable as extraction credit.
struct Byproduct {
  int material = -1;
  double quantity = 0.0;

  friend bool operator==(const Byproduct&, const Byproduct&) = default;
};

/// Impact added by the production step itself, on top of the inputs.
/// Zero by default so the recursion is a pure weighted sum.
struct Overhead {
  double time = 0.0;
  double climate = 0.0;

  friend bool operator==(const Overhead&, const Overhead&) = default;
};

struct ProductSpec {
  int id = -1;
  std::string name;
  int level = 0;
  std::vector<std::string> features;  ///< sorted, unique, non-empty
  std::vector<InputSlot> inputs;      ///< empty iff level == 0
  int wrapped_material = -1;          ///< raw material id, valid iff level == 0
  std::vector<Byproduct> byproducts;
  Overhead direct_overhead;

  friend bool operator==(const ProductSpec&, const ProductSpec&) = default;
};

/// Immutable catalog of raw materials and product recipes. Fill the public
/// fields, run validate(), then finalize() before handing it to planning
/// code. Finalized economies are safe to share across threads.
class Economy {
 public:
  std::string schema_version = "circloop/1";
  std::vector<RawMaterial> raw_materials;
  std::vector<ProductSpec> products;

  int material_count() const { return static_cast<int>(raw_materials.size()); }
  int product_count() const { return static_cast<int>(products.size()); }

  bool finalized() const { return finalized_; }

  /// Assigns dense ids by array position, canonicalizes feature lists and
  /// builds the lookup tables. Call only on a validated economy.
  void finalize() {
    material_by_name_.clear();
    product_by_name_.clear();
    for (int i = 0; i < material_count(); ++i) {
      raw_materials[i].id = i;
      if (!material_by_name_.emplace(raw_materials[i].name, i).second)
        throw std::logic_error("finalize: duplicate material name " + raw_materials[i].name);
    }
    max_level_ = 0;
    for (int i = 0; i < product_count(); ++i) {
      auto& p = products[i];
      p.id = i;
      std::sort(p.features.begin(), p.features.end());
      p.features.erase(std::unique(p.features.begin(), p.features.end()), p.features.end());
      for (int s = 0; s < static_cast<int>(p.inputs.size()); ++s) p.inputs[s].slot_index = s;
      if (!product_by_name_.emplace(p.name, i).second)
        throw std::logic_error("finalize: duplicate product name " + p.name);
      max_level_ = std::max(max_level_, p.level);
    }
    // feature classes: products with identical feature sets are substitutes
    std::map<std::vector<std::string>, int> class_ids;
    class_of_.assign(product_count(), -1);
    classes_.clear();
    for (int i = 0; i < product_count(); ++i) {
      auto [it, fresh] = class_ids.emplace(products[i].features, static_cast<int>(classes_.size()));
      if (fresh) classes_.emplace_back();
      class_of_[i] = it->second;
      classes_[it->second].push_back(i);  // ascending by construction
    }
    finalized_ = true;
  }

  int find_material(std::string_view name) const {
    auto it = material_by_name_.find(std::string(name));
    return it == material_by_name_.end() ? -1 : it->second;
  }

  int find_product(std::string_view name) const {
    auto it = product_by_name_.find(std::string(name));
    return it == product_by_name_.end() ? -1 : it->second;
  }

  const RawMaterial& material(int id) const {
    if (id < 0 || id >= material_count()) throw std::out_of_range("unknown material id " + std::to_string(id));
    return raw_materials[id];
  }

  const ProductSpec& product(int id) const {
    if (id < 0 || id >= product_count()) throw std::out_of_range("unknown product id " + std::to_string(id));
    return products[id];
  }

  int feature_class(int product_id) const {
    product(product_id);
    return class_of_[product_id];
  }

  const std::vector<int>& class_members(int class_id) const { return classes_.at(class_id); }

  int max_level() const { return max_level_; }

  friend bool operator==(const Economy& a, const Economy& b) {
    return a.schema_version == b.schema_version && a.raw_materials == b.raw_materials &&
           a.products == b.products;
  }

 private:
  bool finalized_ = false;
  std::unordered_map<std::string, int> material_by_name_;
  std::unordered_map<std::string, int> product_by_name_;
  std::vector<int> class_of_;
  std::vector<std::vector<int>> classes_;
  int max_level_ = 0;
};

namespace detail {

inline bool is_finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace detail

/// Checks every model invariant and returns one diagnostic per violation.
/// An empty result means the economy is sound; ids in messages refer to
/// names where available.
inline std::vector<Diagnostic> validate(const Economy& eco) {
  std::vector<Diagnostic> out;
  const int k = eco.product_count();
  const int r = eco.material_count();

  std::unordered_map<std::string, int> seen_material;
  for (int i = 0; i < r; ++i) {
    const auto& m = eco.raw_materials[i];
    const std::string where = "raw_materials[" + std::to_string(i) + "]";
    if (m.name.empty()) out.push_back({where, "material name must be non-empty"});
    if (!seen_material.emplace(m.name, i).second)
      out.push_back({where, "duplicate material name " + m.name});
    if (!detail::is_finite_nonneg(m.base_time))
      out.push_back({where, "material " + m.name + ": base_time must be finite and >= 0"});
    if (!detail::is_finite_nonneg(m.base_climate))
      out.push_back({where, "material " + m.name + ": base_climate must be finite and >= 0"});
  }

  std::unordered_map<std::string, int> seen_product;
  for (int i = 0; i < k; ++i) {
    const auto& p = eco.products[i];
    const std::string where = "products[" + std::to_string(i) + "]";
    if (p.name.empty()) out.push_back({where, "product name must be non-empty"});
    if (!seen_product.emplace(p.name, i).second)
      out.push_back({where, "duplicate product name " + p.name});
    if (p.features.empty()) out.push_back({where, "product " + p.name + ": empty feature set"});
    if (p.level < 0) out.push_back({where, "product " + p.name + ": negative level"});

    if (p.level == 0) {
      if (!p.inputs.empty() || p.wrapped_material < 0 || p.wrapped_material >= r)
        out.push_back({where, "product " + p.name + ": level-0 must wrap exactly one raw material"});
      if (p.direct_overhead.time != 0.0 || p.direct_overhead.climate != 0.0)
        out.push_back({where, "product " + p.name + ": level-0 must not declare overhead"});
    } else {
      if (p.wrapped_material != -1)
        out.push_back({where, "product " + p.name + ": only level-0 products wrap a raw material"});
      for (size_t s = 0; s < p.inputs.size(); ++s) {
        const auto& in = p.inputs[s];
        if (!detail::is_finite_nonneg(in.quantity))
          out.push_back({where, "product " + p.name + ": slot " + std::to_string(s) +
                                    " quantity must be finite and >= 0"});
        if (in.default_supplier < 0 || in.default_supplier >= k) {
          out.push_back({where, "product " + p.name + ": slot " + std::to_string(s) +
                                    " references an unknown supplier"});
        } else if (eco.products[in.default_supplier].level >= p.level) {
          out.push_back({where, "level violation at product " + p.name + ": slot " +
                                    std::to_string(s) + " supplier " +
                                    eco.products[in.default_supplier].name + " has level " +
                                    std::to_string(eco.products[in.default_supplier].level) +
                                    " >= " + std::to_string(p.level)});
        }
      }
    }
    for (size_t b = 0; b < p.byproducts.size(); ++b) {
      if (p.byproducts[b].material < 0 || p.byproducts[b].material >= r)
        out.push_back({where, "product " + p.name + ": byproduct " + std::to_string(b) +
                                  " references an unknown material"});
      if (!detail::is_finite_nonneg(p.byproducts[b].quantity))
        out.push_back({where, "product " + p.name + ": byproduct " + std::to_string(b) +
                                  " quantity must be finite and >= 0"});
    }
    if (!detail::is_finite_nonneg(p.direct_overhead.time) ||
        !detail::is_finite_nonneg(p.direct_overhead.climate))
      out.push_back({where, "product " + p.name + ": overhead must be finite and >= 0"});
  }

  // independent acyclicity check over default-supplier edges (the level rule
  // already implies it; a broken level field must not crash the walk)
  enum class Color : uint8_t { White, Grey, Black };
  std::vector<Color> color(k, Color::White);
  std::vector<int> stack;
  for (int root = 0; root < k; ++root) {
    if (color[root] != Color::White) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      int v = stack.back();
      if (color[v] == Color::White) {
        color[v] = Color::Grey;
        for (const auto& in : eco.products[v].inputs) {
          int w = in.default_supplier;
          if (w < 0 || w >= k) continue;
          if (color[w] == Color::Grey) {
            out.push_back({"products[" + std::to_string(v) + "]",
                           "cycle detected involving product " + eco.products[v].name});
          } else if (color[w] == Color::White) {
            stack.push_back(w);
          }
        }
      } else {
        color[v] = Color::Black;
        stack.pop_back();
      }
    }
  }
  return out;
}

/// Products interchangeable with `product_id`: exactly the same feature set,
/// the product itself excluded. Ascending id order.
inline std::vector<int> substitutes(const Economy& eco, int product_id) {
  const auto& members = eco.class_members(eco.feature_class(product_id));
  std::vector<int> out;
  out.reserve(members.size() - 1);
  for (int m : members)
    if (m != product_id) out.push_back(m);
  return out;
}

/// Per-product request driving the planner. Units must be finite and >= 0;
/// at least one entry is required.
class Demand {
 public:
  Demand(const Economy& eco, std::vector<std::pair<int, double>> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("demand must contain at least one entry");
    std::sort(entries_.begin(), entries_.end());
    for (size_t i = 0; i < entries_.size(); ++i) {
      eco.product(entries_[i].first);
      if (!detail::is_finite_nonneg(entries_[i].second))
        throw std::invalid_argument("demand units must be finite and >= 0");
      if (i > 0 && entries_[i].first == entries_[i - 1].first)
        throw std::invalid_argument("duplicate demand entry for product " +
                                    eco.products[entries_[i].first].name);
    }
  }

  const std::vector<std::pair<int, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<int, double>> entries_;  // sorted by product id
};

}  // namespace circloop
