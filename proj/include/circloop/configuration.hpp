#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "circloop/bitset.hpp"
#include "circloop/economy.hpp"
#include "circloop/lca.hpp"

namespace circloop {

/// A pre-product replacement at one input slot: the supplier of `owner`'s
/// slot changes from `from` to `to`. Legal only when `from` is the currently
/// chosen supplier, `to` has exactly the same feature set, and `to`'s level
/// is strictly below the owner's.
struct Move {
  int owner = -1;
  int slot = -1;
  int from = -1;
  int to = -1;

  friend bool operator==(const Move&, const Move&) = default;
  friend auto operator<=>(const Move&, const Move&) = default;
};

/// Per-product material bitsets plus the configuration version they belong
/// to. Bit i of a product's set is on iff raw material i occurs with
/// positive quantity somewhere in its transitive composition under the
/// current supplier choices.
struct BitsetTable {
  std::vector<MaterialBitset> bits;
  uint64_t version = 0;
};

/// Snapshot taken by Configuration::apply, sufficient to restore the exact
/// prior state (chosen map, memo rows, bitsets) bit for bit. Tokens must be
/// undone in reverse apply order on the configuration that created them.
class UndoToken {
 public:
  const Move& move() const { return move_; }
  /// Products whose bitset changed under the move, ascending id.
  const std::vector<int>& bitset_changes() const { return bitset_changes_; }

 private:
  friend class Configuration;
  Move move_;
  uint64_t stack_pos = 0;
  uint64_t config_tag = 0;
  std::vector<int> memo_products;
  std::vector<uint8_t> memo_flags;
  std::vector<double> memo_values;  // (2 + r) doubles per saved product
  std::vector<int> bitset_products;
  std::vector<uint64_t> bitset_words;  // words-per-set entries per saved product
  std::vector<int> bitset_changes_;
};

/// Mutable planning state over an immutable Economy: the chosen supplier of
/// every input slot, a memoized impact vector per product, and the material
/// bitset table. Moves are applied and reverted make/unmake style; caches
/// are patched incrementally instead of recomputed.
///
/// A Configuration has a single owner. Parallel searches clone one per
/// worker; clones start with an empty undo stack.
class Configuration {
 public:
  explicit Configuration(const Economy& eco) : eco_(&eco), tag_(next_tag()) {
    if (!eco.finalized()) throw std::logic_error("economy must be finalized");
    const int k = eco.product_count();
    const int r = eco.material_count();
    chosen_.resize(k);
    users_.resize(k);
    for (int p = 0; p < k; ++p) {
      const auto& spec = eco.products[p];
      chosen_[p].reserve(spec.inputs.size());
      for (const auto& in : spec.inputs) chosen_[p].push_back(in.default_supplier);
    }
    rebuild_users();

    asc_order_.resize(k);
    for (int i = 0; i < k; ++i) asc_order_[i] = i;
    std::stable_sort(asc_order_.begin(), asc_order_.end(),
                     [&](int a, int b) { return eco.products[a].level < eco.products[b].level; });
    desc_order_.assign(asc_order_.rbegin(), asc_order_.rend());

    lca_valid_.assign(k, 0);
    lca_time_.assign(k, 0.0);
    lca_climate_.assign(k, 0.0);
    lca_materials_.assign(static_cast<size_t>(k) * r, 0.0);

    level_of_.resize(k);
    wrapped_of_.resize(k);
    bits_children_.resize(k);
    for (int p = 0; p < k; ++p) {
      level_of_[p] = eco.products[p].level;
      wrapped_of_[p] = eco.products[p].wrapped_material;
      for (size_t s = 0; s < eco.products[p].inputs.size(); ++s)
        if (eco.products[p].inputs[s].quantity > 0.0)
          bits_children_[p].push_back(static_cast<int>(s));
    }

    mark_.assign(k, 0);
    coeff_.assign(k, 0.0);
    level_bucket_.resize(static_cast<size_t>(eco.max_level()) + 1);
    scratch_bits_ = MaterialBitset(r);

    table_.bits.assign(k, MaterialBitset(r));
    for (int pid : asc_order_) recompute_bits(pid, table_.bits[pid]);
    table_.version = version_;
  }

  Configuration(const Configuration& o)
      : eco_(o.eco_),
        chosen_(o.chosen_),
        users_(o.users_),
        version_(o.version_),
        audit_(o.audit_),
        lca_valid_(o.lca_valid_),
        lca_time_(o.lca_time_),
        lca_climate_(o.lca_climate_),
        lca_materials_(o.lca_materials_),
        table_(o.table_),
        mark_(o.mark_),
        coeff_(o.coeff_),
        level_bucket_(o.level_bucket_),
        scratch_bits_(o.scratch_bits_),
        epoch_(o.epoch_),
        tag_(next_tag()),  // clones start a fresh undo stack
        asc_order_(o.asc_order_),
        desc_order_(o.desc_order_),
        level_of_(o.level_of_),
        wrapped_of_(o.wrapped_of_),
        bits_children_(o.bits_children_) {}

  Configuration& operator=(const Configuration&) = delete;

  const Economy& economy() const { return *eco_; }
  uint64_t version() const { return version_; }

  int slot_count(int product_id) const {
    return static_cast<int>(chosen_[check_product(product_id)].size());
  }

  int chosen(int product_id, int slot) const {
    check_product(product_id);
    if (slot < 0 || slot >= static_cast<int>(chosen_[product_id].size()))
      throw std::out_of_range("no such input slot");
    return chosen_[product_id][slot];
  }

  /// When enabled, every apply/undo re-derives all caches from scratch and
  /// throws on divergence. Expensive; meant for the --audit planning mode.
  void set_audit(bool on) { audit_ = on; }

  // ---- life cycle assessment ---------------------------------------------

  /// Memoized recursive impact of one unit of `product_id` under the current
  /// supplier choices. Level-0 products evaluate to lca_raw of the wrapped
  /// material; higher levels sum quantity-weighted inputs plus overhead.
  LcaVector lca_product(int product_id) {
    check_product(product_id);
    ensure_lca(product_id);
    LcaVector v;
    v.time = lca_time_[product_id];
    v.climate = lca_climate_[product_id];
    auto row = materials_row(product_id);
    v.materials.assign(row.begin(), row.end());
    return v;
  }

  bool lca_cached(int product_id) const { return lca_valid_[check_product(product_id)] != 0; }

  /// Cached impact without computing anything; throws when the memo entry is
  /// not populated.
  LcaVector cached_lca(int product_id) const {
    if (!lca_cached(product_id)) throw std::logic_error("lca not cached for this product");
    LcaVector v;
    v.time = lca_time_[product_id];
    v.climate = lca_climate_[product_id];
    auto row = materials_row(product_id);
    v.materials.assign(row.begin(), row.end());
    return v;
  }

  /// Sum of units * lca over the demand entries. Zero-unit entries
  /// contribute an exact zero.
  LcaVector total_impact(const Demand& demand) {
    LcaVector total = LcaVector::zeros(eco_->material_count());
    for (const auto& [pid, units] : demand.entries()) {
      if (units <= 0.0) continue;
      total.add_scaled(lca_product(pid), units);
    }
    return total;
  }

  void invalidate_all_lca() { std::fill(lca_valid_.begin(), lca_valid_.end(), uint8_t{0}); }

  /// Fills the memo for every product.
  void prime_lca() {
    for (int pid : asc_order_) ensure_lca(pid);
  }

  // ---- material bitsets ----------------------------------------------------

  const BitsetTable& bitset_table() const { return table_; }

  const MaterialBitset& bitset(int product_id) const {
    return table_.bits[check_product(product_id)];
  }

  // ---- demand closure -------------------------------------------------------

  /// Units of each product that must be produced to satisfy the demand under
  /// the current configuration: units(p) = demand(p) + sum over using slots
  /// of units(user) * quantity.
  std::vector<double> production_units(const Demand& demand) const {
    std::vector<double> units(eco_->product_count(), 0.0);
    for (const auto& [pid, u] : demand.entries()) units[pid] += u;
    for (int pid : desc_order_)
      if (units[pid] > 0.0) {
        const auto& spec = eco_->products[pid];
        for (size_t s = 0; s < spec.inputs.size(); ++s)
          units[chosen_[pid][s]] += units[pid] * spec.inputs[s].quantity;
      }
    return units;
  }

  /// Products with positive production units, ascending id.
  std::vector<int> demand_closure(const Demand& demand) const {
    std::vector<double> units = production_units(demand);
    std::vector<int> out;
    for (int p = 0; p < eco_->product_count(); ++p)
      if (units[p] > 0.0) out.push_back(p);
    return out;
  }

  // ---- make / unmake ---------------------------------------------------------

  /// Applies a legal move: rebinds the slot, patches every memoized ancestor
  /// impact by the replacement delta, and propagates bitset changes upward
  /// with an early stop at unchanged ancestors. Throws without touching any
  /// state if the move is stale or violates the feature/level rules.
  UndoToken apply(const Move& m) {
    const double q = validate_move(m);

    // recycle the storage of the last undone token; steady apply/undo
    // alternation then runs allocation free
    UndoToken tok = std::move(spare_);
    tok.memo_products.clear();
    tok.memo_flags.clear();
    tok.memo_values.clear();
    tok.bitset_products.clear();
    tok.bitset_words.clear();
    tok.bitset_changes_.clear();
    tok.move_ = m;
    tok.config_tag = tag_;

    collect_affected(m.owner);
    snapshot_memo(tok);

    bool patch = false;
    if (q > 0.0 && any_affected_memo_valid()) {
      ensure_lca(m.from);  // both live below the owner, unaffected by the move
      ensure_lca(m.to);
      delta_time_ = q * (lca_time_[m.to] - lca_time_[m.from]);
      delta_climate_ = q * (lca_climate_[m.to] - lca_climate_[m.from]);
      delta_materials_.resize(eco_->material_count());
      auto from_row = materials_row(m.from);
      auto to_row = materials_row(m.to);
      patch = delta_time_ != 0.0 || delta_climate_ != 0.0;
      for (size_t i = 0; i < delta_materials_.size(); ++i) {
        delta_materials_[i] = q * (to_row[i] - from_row[i]);
        patch = patch || delta_materials_[i] != 0.0;
      }
    }

    chosen_[m.owner][m.slot] = m.to;
    users_erase(m.from, m.owner, m.slot);
    users_insert(m.to, m.owner, m.slot);

    if (patch) propagate_delta();
    clear_buckets();

    ++version_;
    update_bitsets_after(m.owner, &tok);
    tok.bitset_changes_.assign(tok.bitset_products.begin(), tok.bitset_products.end());
    std::sort(tok.bitset_changes_.begin(), tok.bitset_changes_.end());
    table_.version = version_;

    tok.stack_pos = ++stack_size_;
    if (audit_) audit_full();
    return tok;
  }

  /// Reverts the most recent un-undone apply, restoring chosen map, memo
  /// rows and bitsets bit for bit from the token's snapshot.
  void undo(UndoToken&& tok) {
    if (tok.config_tag != tag_)
      throw std::logic_error("undo token belongs to another configuration");
    if (tok.stack_pos != stack_size_) throw std::logic_error("out-of-order undo");

    const Move& m = tok.move_;
    chosen_[m.owner][m.slot] = m.from;
    users_erase(m.to, m.owner, m.slot);
    users_insert(m.from, m.owner, m.slot);

    const int r = eco_->material_count();
    for (size_t i = 0; i < tok.memo_products.size(); ++i) {
      int pid = tok.memo_products[i];
      lca_valid_[pid] = tok.memo_flags[i];
      const double* src = tok.memo_values.data() + i * (2 + r);
      lca_time_[pid] = src[0];
      lca_climate_[pid] = src[1];
      auto row = materials_row(pid);
      std::copy(src + 2, src + 2 + r, row.begin());
    }
    const size_t words = table_.bits.empty() ? 0 : table_.bits[0].words().size();
    for (size_t i = 0; i < tok.bitset_products.size(); ++i)
      table_.bits[tok.bitset_products[i]].restore_words(tok.bitset_words.data() + i * words);

    --stack_size_;
    ++version_;
    table_.version = version_;
    spare_ = std::move(tok);  // keep the buffers for the next apply
    if (audit_) audit_full();
  }

  // ---- consistency ------------------------------------------------------------

  /// Compares every cached impact vector and every bitset against a
  /// from-scratch recomputation. Throws std::logic_error on divergence.
  void audit_full(double tol = kImpactTolerance) const {
    const int k = eco_->product_count();
    const int r = eco_->material_count();
    std::vector<double> t(k, 0.0), c(k, 0.0), mats(static_cast<size_t>(k) * r, 0.0);
    std::vector<MaterialBitset> bits(k, MaterialBitset(r));
    for (int pid : asc_order_) {
      const auto& spec = eco_->products[pid];
      double* row = mats.data() + static_cast<size_t>(pid) * r;
      if (spec.level == 0) {
        const auto& m = eco_->raw_materials[spec.wrapped_material];
        t[pid] = m.base_time;
        c[pid] = m.base_climate;
        row[spec.wrapped_material] = 1.0;
        bits[pid].set(spec.wrapped_material);
      } else {
        t[pid] = spec.direct_overhead.time;
        c[pid] = spec.direct_overhead.climate;
        for (size_t s = 0; s < spec.inputs.size(); ++s) {
          const int child = chosen_[pid][s];
          const double q = spec.inputs[s].quantity;
          t[pid] += q * t[child];
          c[pid] += q * c[child];
          const double* crow = mats.data() + static_cast<size_t>(child) * r;
          for (int i = 0; i < r; ++i) row[i] += q * crow[i];
          if (q > 0.0) bits[pid] |= bits[child];
        }
      }
    }
    for (int pid = 0; pid < k; ++pid) {
      if (lca_valid_[pid]) {
        auto row = materials_row(pid);
        bool ok = std::fabs(lca_time_[pid] - t[pid]) <= tol &&
                  std::fabs(lca_climate_[pid] - c[pid]) <= tol;
        for (int i = 0; ok && i < r; ++i)
          ok = std::fabs(row[i] - mats[static_cast<size_t>(pid) * r + i]) <= tol;
        if (!ok)
          throw std::logic_error("audit: cached lca of product " + eco_->products[pid].name +
                                 " drifted from recomputation");
      }
      if (!(table_.bits[pid] == bits[pid]))
        throw std::logic_error("audit: bitset of product " + eco_->products[pid].name +
                               " drifted from recomputation");
    }
  }

  /// Slot invariants of the current configuration: every chosen supplier
  /// keeps the default supplier's feature class and a level strictly below
  /// its owner.
  std::vector<Diagnostic> check_invariants() const {
    std::vector<Diagnostic> out;
    for (int pid = 0; pid < eco_->product_count(); ++pid) {
      const auto& spec = eco_->products[pid];
      for (size_t s = 0; s < spec.inputs.size(); ++s) {
        int cur = chosen_[pid][s];
        int dflt = spec.inputs[s].default_supplier;
        if (eco_->feature_class(cur) != eco_->feature_class(dflt))
          out.push_back({"", "product " + spec.name + " slot " + std::to_string(s) +
                                 ": chosen supplier breaks feature equality"});
        if (eco_->products[cur].level >= spec.level)
          out.push_back({"", "product " + spec.name + " slot " + std::to_string(s) +
                                 ": chosen supplier breaks the level rule"});
      }
    }
    return out;
  }

  /// Products ordered by ascending level (suppliers before users).
  const std::vector<int>& products_by_level_asc() const { return asc_order_; }
  const std::vector<int>& products_by_level_desc() const { return desc_order_; }

 private:
  struct UserEdge {
    int user = -1;
    int slot = -1;
    double quantity = 0.0;  // static per (user, slot); cached off ProductSpec

    static bool pos_less(const UserEdge& a, const UserEdge& b) {
      return a.user != b.user ? a.user < b.user : a.slot < b.slot;
    }
  };

  static uint64_t next_tag() {
    static std::atomic<uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  int check_product(int pid) const {
    if (pid < 0 || pid >= eco_->product_count())
      throw std::out_of_range("unknown product id " + std::to_string(pid));
    return pid;
  }

  std::span<double> materials_row(int pid) {
    return {lca_materials_.data() + static_cast<size_t>(pid) * eco_->material_count(),
            static_cast<size_t>(eco_->material_count())};
  }
  std::span<const double> materials_row(int pid) const {
    return {lca_materials_.data() + static_cast<size_t>(pid) * eco_->material_count(),
            static_cast<size_t>(eco_->material_count())};
  }

  void rebuild_users() {
    for (auto& u : users_) u.clear();
    for (int pid = 0; pid < eco_->product_count(); ++pid)
      for (size_t s = 0; s < chosen_[pid].size(); ++s)
        users_[chosen_[pid][s]].push_back(
            {pid, static_cast<int>(s), eco_->products[pid].inputs[s].quantity});
    for (auto& u : users_) std::sort(u.begin(), u.end(), UserEdge::pos_less);
  }

  // users_ lists are kept sorted so their order is a function of the state,
  // not of the move history
  void users_erase(int supplier, int user, int slot) {
    auto& vec = users_[supplier];
    UserEdge e{user, slot, 0.0};
    auto it = std::lower_bound(vec.begin(), vec.end(), e, UserEdge::pos_less);
    if (it == vec.end() || it->user != user || it->slot != slot)
      throw std::logic_error("user edge missing");
    vec.erase(it);
  }

  void users_insert(int supplier, int user, int slot) {
    auto& vec = users_[supplier];
    UserEdge e{user, slot, eco_->products[user].inputs[slot].quantity};
    vec.insert(std::lower_bound(vec.begin(), vec.end(), e, UserEdge::pos_less), e);
  }

  void ensure_lca(int pid) {
    if (lca_valid_[pid]) return;
    const auto& spec = eco_->products[pid];
    auto row = materials_row(pid);
    std::fill(row.begin(), row.end(), 0.0);
    if (spec.level == 0) {
      const auto& m = eco_->raw_materials[spec.wrapped_material];
      lca_time_[pid] = m.base_time;
      lca_climate_[pid] = m.base_climate;
      row[spec.wrapped_material] = 1.0;
    } else {
      double t = spec.direct_overhead.time;
      double c = spec.direct_overhead.climate;
      for (size_t s = 0; s < spec.inputs.size(); ++s) {
        const int child = chosen_[pid][s];
        ensure_lca(child);
        const double q = spec.inputs[s].quantity;
        t += q * lca_time_[child];
        c += q * lca_climate_[child];
        auto crow = materials_row(child);
        for (size_t i = 0; i < row.size(); ++i) row[i] += q * crow[i];
      }
      lca_time_[pid] = t;
      lca_climate_[pid] = c;
    }
    lca_valid_[pid] = 1;
  }

  double validate_move(const Move& m) const {
    check_product(m.owner);
    check_product(m.from);
    check_product(m.to);
    const auto& owner = eco_->products[m.owner];
    if (m.slot < 0 || m.slot >= static_cast<int>(owner.inputs.size()))
      throw std::invalid_argument("move references a slot the owner does not have");
    if (chosen_[m.owner][m.slot] != m.from)
      throw std::invalid_argument("stale move: slot currently supplied by " +
                                  eco_->products[chosen_[m.owner][m.slot]].name + ", not " +
                                  eco_->products[m.from].name);
    if (m.to == m.from) throw std::invalid_argument("move must change the supplier");
    if (eco_->feature_class(m.to) != eco_->feature_class(m.from))
      throw std::invalid_argument("feature mismatch: " + eco_->products[m.to].name +
                                  " cannot substitute " + eco_->products[m.from].name);
    if (eco_->products[m.to].level >= owner.level)
      throw std::invalid_argument("level violation: " + eco_->products[m.to].name +
                                  " has level >= " + owner.name);
    return owner.inputs[m.slot].quantity;
  }

  /// BFS over user edges from `origin`, bucketed by level. Marks visited
  /// products with the current epoch and zeroes their coefficients.
  void collect_affected(int origin) {
    ++epoch_;
    touched_levels_.clear();
    affected_.clear();
    auto push = [&](int pid) {
      mark_[pid] = epoch_;
      coeff_[pid] = 0.0;
      int lvl = level_of_[pid];
      if (level_bucket_[lvl].empty()) touched_levels_.push_back(lvl);
      level_bucket_[lvl].push_back(pid);
      affected_.push_back(pid);
    };
    push(origin);
    for (size_t head = 0; head < affected_.size(); ++head)
      for (const UserEdge& e : users_[affected_[head]])
        if (mark_[e.user] != epoch_) push(e.user);
    coeff_[origin] = 1.0;
    std::sort(touched_levels_.begin(), touched_levels_.end());
  }

  void clear_buckets() {
    for (int lvl : touched_levels_) level_bucket_[lvl].clear();
    touched_levels_.clear();
  }

  bool any_affected_memo_valid() const {
    for (int pid : affected_)
      if (lca_valid_[pid]) return true;
    return false;
  }

  void snapshot_memo(UndoToken& tok) const {
    const int r = eco_->material_count();
    tok.memo_products.assign(affected_.begin(), affected_.end());
    tok.memo_flags.resize(affected_.size());
    tok.memo_values.resize(affected_.size() * (2 + r));
    for (size_t i = 0; i < affected_.size(); ++i) {
      int pid = tok.memo_products[i];
      tok.memo_flags[i] = lca_valid_[pid];
      double* dst = tok.memo_values.data() + i * (2 + r);
      dst[0] = lca_time_[pid];
      dst[1] = lca_climate_[pid];
      auto row = materials_row(pid);
      std::copy(row.begin(), row.end(), dst + 2);
    }
  }

  /// Adds coeff(p) * delta to every memoized affected product, where coeff
  /// accumulates quantity products over all user paths from the moved slot's
  /// owner. Levels ascend, so a product is final before its users read it.
  void propagate_delta() {
    const int r = eco_->material_count();
    for (int lvl : touched_levels_) {
      for (int pid : level_bucket_[lvl]) {
        const double c = coeff_[pid];
        if (c == 0.0) continue;
        if (lca_valid_[pid]) {
          lca_time_[pid] += c * delta_time_;
          lca_climate_[pid] += c * delta_climate_;
          auto row = materials_row(pid);
          for (int i = 0; i < r; ++i) row[i] += c * delta_materials_[i];
        }
        for (const UserEdge& e : users_[pid]) coeff_[e.user] += e.quantity * c;
      }
    }
  }

  /// OR-fold of the chosen children with positive quantity (level-0: the
  /// wrapped material's single bit).
  void recompute_bits(int pid, MaterialBitset& out) const {
    out.reset();
    if (level_of_[pid] == 0) {
      out.set(wrapped_of_[pid]);
      return;
    }
    for (int s : bits_children_[pid]) out |= table_.bits[chosen_[pid][s]];
  }

  /// Recomputes the moved slot's owner and walks user edges upward in level
  /// order, stopping at products whose bitset did not change. Only users of
  /// changed products are visited. Fills the token's bitset snapshot in
  /// discovery order.
  void update_bitsets_after(int origin, UndoToken* tok) {
    tok->bitset_products.reserve(affected_.size());
    tok->bitset_words.reserve(affected_.size() * table_.bits[origin].words().size());
    ++epoch_;
    touched_levels_.clear();
    auto enqueue = [&](int pid) {
      mark_[pid] = epoch_;
      int lvl = level_of_[pid];
      if (level_bucket_[lvl].empty()) touched_levels_.push_back(lvl);
      level_bucket_[lvl].push_back(pid);
    };
    enqueue(origin);
    // user edges strictly increase level, so a numeric sweep upward sees
    // every enqueued product after all of its suppliers settled
    const int top = eco_->max_level();
    for (int lvl = level_of_[origin]; lvl <= top; ++lvl) {
      auto& bucket = level_bucket_[lvl];
      for (size_t bi = 0; bi < bucket.size(); ++bi) {
        int pid = bucket[bi];
        recompute_bits(pid, scratch_bits_);
        if (scratch_bits_ == table_.bits[pid]) continue;  // fixed point: stop here
        tok->bitset_products.push_back(pid);
        const auto& words = table_.bits[pid].words();
        tok->bitset_words.insert(tok->bitset_words.end(), words.begin(), words.end());
        table_.bits[pid] = scratch_bits_;
        for (const UserEdge& e : users_[pid])
          if (mark_[e.user] != epoch_) enqueue(e.user);
      }
    }
    clear_buckets();
  }

  const Economy* eco_;
  std::vector<std::vector<int>> chosen_;
  std::vector<std::vector<UserEdge>> users_;
  uint64_t version_ = 0;
  uint64_t stack_size_ = 0;
  bool audit_ = false;

  std::vector<uint8_t> lca_valid_;
  std::vector<double> lca_time_;
  std::vector<double> lca_climate_;
  std::vector<double> lca_materials_;

  BitsetTable table_;

  // scratch reused across applies; epoch marks avoid O(k) clears
  std::vector<uint64_t> mark_;
  std::vector<double> coeff_;
  double delta_time_ = 0.0;
  double delta_climate_ = 0.0;
  std::vector<double> delta_materials_;
  std::vector<std::vector<int>> level_bucket_;
  std::vector<int> touched_levels_;
  std::vector<int> affected_;
  MaterialBitset scratch_bits_;
  uint64_t epoch_ = 0;
  uint64_t tag_ = 0;
  UndoToken spare_;

  std::vector<int> asc_order_;
  std::vector<int> desc_order_;

  // dense copies of per-product fields read in the hot walks
  std::vector<int> level_of_;
  std::vector<int> wrapped_of_;
  std::vector<std::vector<int>> bits_children_;  // slots with positive quantity
};

/// Spec-level names for the make/unmake pair.
inline UndoToken apply_move(Configuration& config, const Move& move) { return config.apply(move); }
inline void undo_move(Configuration& config, UndoToken&& token) { config.undo(std::move(token)); }

/// From-scratch material bitset of one product, the oracle form of the
/// incremental table. Ignores the configuration's cached table.
inline MaterialBitset bitset_from_scratch(const Configuration& config, int product_id) {
  const Economy& eco = config.economy();
  eco.product(product_id);
  std::vector<int8_t> done(eco.product_count(), 0);
  std::vector<MaterialBitset> buf(eco.product_count());
  auto rec = [&](auto&& self, int pid) -> const MaterialBitset& {
    if (done[pid]) return buf[pid];
    const auto& spec = eco.products[pid];
    buf[pid] = MaterialBitset(eco.material_count());
    if (spec.level == 0) {
      buf[pid].set(spec.wrapped_material);
    } else {
      for (size_t s = 0; s < spec.inputs.size(); ++s)
        if (spec.inputs[s].quantity > 0.0)
          buf[pid] |= self(self, config.chosen(pid, static_cast<int>(s)));
    }
    done[pid] = 1;
    return buf[pid];
  };
  return rec(rec, product_id);
}

/// Incremental maintenance of an external BitsetTable after `move` has been
/// applied to `config`. The table must be exactly one version behind;
/// otherwise its stamp is stale and a logic_error is thrown. Returns the ids
/// whose bitset changed, ascending.
inline std::vector<int> bitset_update_on_move(BitsetTable& table, const Configuration& config,
                                              const Move& move) {
  if (table.version + 1 != config.version())
    throw std::logic_error("stale version stamp: table at " + std::to_string(table.version) +
                           ", configuration at " + std::to_string(config.version()));
  const Economy& eco = config.economy();
  config.economy().product(move.owner);
  std::vector<uint8_t> dirty(eco.product_count(), 0);
  std::vector<int> changed;
  MaterialBitset scratch(eco.material_count());
  // level-ascending sweep; a product is recomputed when it is the moved
  // owner or consumes a product that just changed
  for (int pid : config.products_by_level_asc()) {
    const auto& spec = eco.products[pid];
    if (spec.level == 0) continue;
    bool needs = pid == move.owner;
    for (size_t s = 0; !needs && s < spec.inputs.size(); ++s)
      needs = spec.inputs[s].quantity > 0.0 && dirty[config.chosen(pid, static_cast<int>(s))];
    if (!needs) continue;
    scratch.reset();
    for (size_t s = 0; s < spec.inputs.size(); ++s)
      if (spec.inputs[s].quantity > 0.0)
        scratch |= table.bits[config.chosen(pid, static_cast<int>(s))];
    if (scratch == table.bits[pid]) continue;
    table.bits[pid] = scratch;
    dirty[pid] = 1;
    changed.push_back(pid);
  }
  table.version = config.version();
  std::sort(changed.begin(), changed.end());
  return changed;
}

}  // namespace circloop
