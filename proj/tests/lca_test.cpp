#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace circloop;
using namespace circloop::testing;

namespace {

LcaVector vec(double t, double c, std::vector<double> mats) {
  LcaVector v;
  v.time = t;
  v.climate = c;
  v.materials = std::move(mats);
  return v;
}

}  // namespace

TEST_CASE("lca_raw is the base impact plus a unit material entry") {
  Economy eco = make_gears();
  CHECK(lca_raw(eco, 0) == vec(2, 5, {1, 0, 0}));
  CHECK(lca_raw(eco, 1) == vec(1, 1, {0, 1, 0}));
  CHECK_THROWS_AS(lca_raw(eco, 3), std::out_of_range);

  Economy zero = eco;
  zero.raw_materials[0].base_time = 0.0;
  zero.raw_materials[0].base_climate = 0.0;
  zero.finalize();
  CHECK(lca_raw(zero, 0) == vec(0, 0, {1, 0, 0}));
}

TEST_CASE("recursive lca of the gears fixture matches the hand expansion") {
  Economy eco = make_gears();
  Configuration cfg(eco);
  // frozen values were first reproduced by the naive expansion oracle
  ChosenMap chosen = default_chosen(eco);
  CHECK(oracle_lca(eco, chosen, eco.find_product("G")) == vec(4, 10, {2, 0, 0}));
  CHECK(oracle_lca(eco, chosen, eco.find_product("B")) == vec(7, 19, {2, 0, 3}));

  CHECK(cfg.lca_product(eco.find_product("G")) == vec(4, 10, {2, 0, 0}));
  CHECK(cfg.lca_product(eco.find_product("B")) == vec(7, 19, {2, 0, 3}));
}

TEST_CASE("single unit-quantity input composes as the identity") {
  const char* doc = R"({
    "schema_version": "circloop/1",
    "raw_materials": [{"name": "iron", "unit": "kg", "base_time": 1.5, "base_climate": 2.5}],
    "products": [
      {"name": "w", "level": 0, "features": ["m"],
       "inputs": [{"quantity": 1.0, "supplier": "iron"}]},
      {"name": "p", "level": 1, "features": ["part"],
       "inputs": [{"quantity": 1.0, "supplier": "w"}]}
    ]
  })";
  auto eco = parse_economy(doc);
  REQUIRE(eco.economy.has_value());
  Configuration cfg(*eco.economy);
  CHECK(cfg.lca_product(1) == cfg.lca_product(0));
}

TEST_CASE("replacement formula matches the fixture arithmetic") {
  Economy eco = make_gears();
  Configuration cfg(eco);
  LcaVector b = cfg.lca_product(eco.find_product("B"));
  LcaVector g = cfg.lca_product(eco.find_product("G"));
  LcaVector gr = cfg.lca_product(eco.find_product("GR"));
  CHECK(gr == vec(2, 2, {0, 2, 0}));

  CHECK(lca_apply_replacement(b, 1.0, g, gr) == vec(5, 11, {0, 2, 3}));
  CHECK(lca_apply_replacement(b, 1.0, g, g) == b);   // self replacement
  CHECK(lca_apply_replacement(b, 0.0, g, gr) == b);  // zero-quantity slot

  LcaVector wrong_dim = vec(0, 0, {1});
  CHECK_THROWS_AS(lca_apply_replacement(b, 1.0, wrong_dim, gr), std::invalid_argument);
  CHECK_THROWS_AS(lca_apply_replacement(b, -1.0, g, gr), std::invalid_argument);
}

TEST_CASE("replacement formula agrees with a full recomputation after the move") {
  Economy eco = make_gears();
  PlanContext ctx = make_gears_ctx(eco);
  Configuration cfg(eco);
  const int b = eco.find_product("B");
  LcaVector patched = lca_apply_replacement(cfg.lca_product(b), 1.0,
                                            cfg.lca_product(eco.find_product("G")),
                                            cfg.lca_product(eco.find_product("GR")));
  (void)cfg.apply({b, 0, eco.find_product("G"), eco.find_product("GR")});
  CHECK(cfg.lca_product(b).almost_equal(patched));
  CHECK(oracle_lca(eco, chosen_of(cfg), b).almost_equal(patched));
  (void)ctx;
}

TEST_CASE("total impact is linear in the demand") {
  Economy eco = make_gears();
  Configuration cfg(eco);
  const int b = eco.find_product("B");
  CHECK(cfg.total_impact(Demand(eco, {{b, 1.0}})) == vec(7, 19, {2, 0, 3}));
  CHECK(cfg.total_impact(Demand(eco, {{b, 2.0}})) == vec(14, 38, {4, 0, 6}));
  CHECK(cfg.total_impact(Demand(eco, {{b, 0.0}})) == LcaVector::zeros(3));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    double alpha = uniform_real(rng, 0.0, 5.0);
    LcaVector once = cfg.total_impact(Demand(eco, {{b, 1.0}}));
    LcaVector scaled = cfg.total_impact(Demand(eco, {{b, alpha}}));
    once *= alpha;
    CHECK(scaled.almost_equal(once));
  }
}

TEST_CASE("level-0 lca equals lca_raw exactly") {
  Economy eco = generate_economy_model({.seed = 9, .materials = 6, .levels = 2, .per_level = 3,
                                        .class_size = 2, .max_inputs = 2});
  Configuration cfg(eco);
  for (int p = 0; p < eco.product_count(); ++p)
    if (eco.products[p].level == 0)
      CHECK(cfg.lca_product(p) == lca_raw(eco, eco.products[p].wrapped_material));
}

TEST_CASE("bound check reports every exceeded indicator with its excess") {
  PlanetaryBounds bounds;
  bounds.max_climate = 12.0;
  LcaVector high = vec(7, 19, {2, 0, 3});
  FeasibilityReport rep = check_bounds(high, bounds);
  REQUIRE(!rep.feasible);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].indicator == "climate");
  CHECK(rep.violations[0].excess == 7.0);

  CHECK(check_bounds(vec(5, 11, {0, 2, 3}), bounds).feasible);
  CHECK(check_bounds(high, PlanetaryBounds{}).feasible);  // all caps unbounded
}

TEST_CASE("relaxing a cap never makes a feasible impact infeasible") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    LcaVector impact = vec(uniform_real(rng, 0, 20), uniform_real(rng, 0, 20),
                           {uniform_real(rng, 0, 20), uniform_real(rng, 0, 20)});
    PlanetaryBounds tight;
    tight.max_time = uniform_real(rng, 0, 20);
    tight.max_climate = uniform_real(rng, 0, 20);
    tight.max_materials = {uniform_real(rng, 0, 20), std::nullopt};
    PlanetaryBounds loose = tight;
    *loose.max_time += uniform_real(rng, 0, 10);
    *loose.max_climate += uniform_real(rng, 0, 10);
    *loose.max_materials[0] += uniform_real(rng, 0, 10);
    if (check_bounds(impact, tight).feasible) CHECK(check_bounds(impact, loose).feasible);
  }
}

TEST_CASE("scalarize is the weighted indicator sum") {
  Weights ones = Weights::ones(3);
  CHECK(scalarize(vec(7, 19, {2, 0, 3}), ones) == 31.0);
  CHECK(scalarize(LcaVector::zeros(3), ones) == 0.0);

  Weights climate_only;
  climate_only.time = 0.0;
  climate_only.climate = 1.0;
  climate_only.materials = {0, 0, 0};
  CHECK(scalarize(vec(7, 19, {2, 0, 3}), climate_only) == 19.0);

  Weights bad;
  bad.time = 0.0;
  bad.climate = 0.0;
  bad.materials = {0, 0, 0};
  CHECK_THROWS_AS(bad.check(3), std::invalid_argument);
  PlanetaryBounds negative;
  negative.max_time = -1.0;
  CHECK_THROWS_AS(negative.check(3), std::invalid_argument);
}

TEST_CASE("memoized and from-scratch evaluation agree bit for bit before moves") {
  Economy eco = generate_economy_model({.seed = 21, .materials = 5, .levels = 3, .per_level = 3,
                                        .class_size = 2, .max_inputs = 3});
  Configuration cfg(eco);
  ChosenMap chosen = default_chosen(eco);
  for (int p = 0; p < eco.product_count(); ++p)
    CHECK(cfg.lca_product(p) == oracle_lca(eco, chosen, p));
}

TEST_CASE("patched caches stay within tolerance of the oracle after moves") {
  Economy eco = generate_economy_model({.seed = 22, .materials = 5, .levels = 3, .per_level = 3,
                                        .class_size = 2, .max_inputs = 3});
  PlanContext ctx(eco, top_level_demand(eco), Weights::ones(eco.material_count()),
                  PlanetaryBounds{});
  Configuration cfg(eco);
  cfg.prime_lca();
  std::mt19937_64 rng(5);
  for (int step = 0; step < 40; ++step) {
    auto moves = legal_moves(ctx, cfg);
    if (moves.empty()) break;
    (void)cfg.apply(moves[uniform_index(rng, moves.size())]);
    ChosenMap chosen = chosen_of(cfg);
    for (int p = 0; p < eco.product_count(); ++p)
      CHECK(cfg.lca_product(p).almost_equal(oracle_lca(eco, chosen, p)));
  }
}
