#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace circloop;
using namespace circloop::testing;

namespace {

bool has_message(const std::vector<Diagnostic>& diags, const std::string& needle) {
  for (const auto& d : diags)
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("smallest legal economy parses") {
  const char* doc = R"({
    "schema_version": "circloop/1",
    "raw_materials": [{"name": "iron", "unit": "kg", "base_time": 1.0, "base_climate": 2.0}],
    "products": [{"name": "ingot", "level": 0, "features": ["metal"],
                  "inputs": [{"quantity": 1.0, "supplier": "iron"}]}]
  })";
  auto parsed = parse_economy(doc);
  REQUIRE(parsed.economy.has_value());
  CHECK(parsed.economy->product_count() == 1);
  CHECK(parsed.economy->material_count() == 1);
  CHECK(parsed.economy->products[0].wrapped_material == 0);
}

TEST_CASE("gears fixture parses with dense ids") {
  Economy eco = make_gears();
  CHECK(eco.product_count() == 6);
  CHECK(eco.material_count() == 3);
  CHECK(eco.find_product("S") == 0);
  CHECK(eco.find_product("B") == 5);
  CHECK(eco.find_material("plastic") == 2);
  CHECK(eco.products[5].inputs.size() == 2);
  CHECK(validate(eco).empty());
}

TEST_CASE("level violation is reported with the product name") {
  const char* doc = R"({
    "schema_version": "circloop/1",
    "raw_materials": [{"name": "iron", "unit": "kg", "base_time": 1.0, "base_climate": 2.0}],
    "products": [
      {"name": "a", "level": 1, "features": ["x"],
       "inputs": [{"quantity": 1.0, "supplier": "b"}]},
      {"name": "b", "level": 1, "features": ["x"],
       "inputs": [{"quantity": 1.0, "supplier": "a"}]}
    ]
  })";
  auto parsed = parse_economy(doc);
  REQUIRE(!parsed.economy.has_value());
  CHECK(!parsed.parse_error);
  CHECK(has_message(parsed.diagnostics, "level violation at product a"));
}

TEST_CASE("empty feature set is a validation finding") {
  Economy eco = make_gears();
  eco.products[3].features.clear();
  auto diags = validate(eco);
  REQUIRE(!diags.empty());
  CHECK(has_message(diags, "product G: empty feature set"));
}

TEST_CASE("level-0 must wrap exactly one raw material") {
  const char* doc = R"({
    "schema_version": "circloop/1",
    "raw_materials": [{"name": "iron", "unit": "kg", "base_time": 1.0, "base_climate": 2.0}],
    "products": [{"name": "S", "level": 0, "features": ["metal"],
                  "inputs": [{"quantity": 1.0, "supplier": "iron"},
                             {"quantity": 1.0, "supplier": "iron"}]}]
  })";
  auto parsed = parse_economy(doc);
  REQUIRE(!parsed.economy.has_value());
  CHECK(has_message(parsed.diagnostics, "product S: level-0 must wrap exactly one raw material"));
}

TEST_CASE("truncated and mistyped documents are parse errors") {
  auto truncated = parse_economy("{\"schema_version\": \"circloop/1\", \"raw_mat");
  CHECK(truncated.parse_error);
  CHECK(!truncated.economy.has_value());

  auto wrong_version = parse_economy(R"({"schema_version": "circloop/999",
    "raw_materials": [], "products": []})");
  CHECK(wrong_version.parse_error);
  CHECK(has_message(wrong_version.diagnostics, "unknown schema version"));

  auto mistyped = parse_economy(R"({"schema_version": "circloop/1",
    "raw_materials": {}, "products": []})");
  CHECK(mistyped.parse_error);
}

TEST_CASE("parse-serialize-parse is the identity") {
  Economy eco = make_gears();
  auto reparsed = parse_economy(serialize_economy(eco));
  REQUIRE(reparsed.economy.has_value());
  CHECK(*reparsed.economy == eco);

  // also for a generated economy with byproducts
  Economy gen = generate_economy_model({.seed = 5, .materials = 5, .levels = 3, .per_level = 3,
                                        .class_size = 2, .max_inputs = 3, .byproduct_rate = 0.5});
  auto gen2 = parse_economy(serialize_economy(gen));
  REQUIRE(gen2.economy.has_value());
  CHECK(*gen2.economy == gen);
}

TEST_CASE("substitutes are the exact feature class without self") {
  Economy eco = make_gears();
  CHECK(substitutes(eco, eco.find_product("G")) == std::vector<int>{eco.find_product("GR")});
  CHECK(substitutes(eco, eco.find_product("B")).empty());
  CHECK_THROWS_AS(substitutes(eco, 99), std::out_of_range);
}

TEST_CASE("three-way feature class lists the other two ascending") {
  Economy eco = make_gears();
  ProductSpec third;
  third.name = "G3";
  third.level = 1;
  third.features = {"gear"};
  third.inputs.push_back({0, 1.0, eco.find_product("RS")});
  eco.products.push_back(third);
  REQUIRE(validate(eco).empty());
  eco.finalize();
  int g = eco.find_product("G"), gr = eco.find_product("GR"), g3 = eco.find_product("G3");
  CHECK(substitutes(eco, g) == std::vector<int>{gr, g3});
  CHECK(substitutes(eco, g3) == std::vector<int>{g, gr});
}

TEST_CASE("substitutes relation is symmetric on generated economies") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Economy eco = generate_economy_model({.seed = seed, .materials = 4, .levels = 2,
                                          .per_level = 4, .class_size = 3, .max_inputs = 2});
    for (int x = 0; x < eco.product_count(); ++x) {
      CHECK(substitutes(eco, x) == oracle_substitutes(eco, x));
      for (int y : substitutes(eco, x)) {
        auto back = substitutes(eco, y);
        CHECK(std::find(back.begin(), back.end(), x) != back.end());
      }
    }
  }
}

TEST_CASE("slot invariants hold along any legal move walk") {
  Economy eco = make_gears();
  PlanContext ctx = make_gears_ctx(eco);
  Configuration cfg(eco);
  std::mt19937_64 rng(11);
  for (int step = 0; step < 50; ++step) {
    auto moves = legal_moves(ctx, cfg);
    if (moves.empty()) break;
    (void)cfg.apply(moves[uniform_index(rng, moves.size())]);
    CHECK(cfg.check_invariants().empty());
  }
}

TEST_CASE("demand rejects empty and negative entries") {
  Economy eco = make_gears();
  CHECK_THROWS_AS(Demand(eco, {}), std::invalid_argument);
  CHECK_THROWS_AS(Demand(eco, {{0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Demand(eco, {{0, 1.0}, {0, 2.0}}), std::invalid_argument);
  CHECK_NOTHROW(Demand(eco, {{eco.find_product("B"), 0.0}}));
}
