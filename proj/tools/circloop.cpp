// circloop command line: validate economies, run plans, generate random
// instances and render CSV reports.
//
// Exit codes: 0 success, 1 validation findings or runtime refusal,
// 2 malformed input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <circloop/circloop.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int report_diagnostics(const std::vector<circloop::Diagnostic>& diags, bool parse_error) {
  for (const auto& d : diags) std::cerr << d.str() << "\n";
  return parse_error ? kExitParse : kExitInvalid;
}

/// Loads an economy or prints diagnostics and returns the exit code in
/// `status`.
std::optional<circloop::Economy> load_economy(const std::string& path, int& status) {
  circloop::EconomyParse parsed;
  try {
    parsed = circloop::parse_economy(read_file(path));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    status = kExitParse;
    return std::nullopt;
  }
  if (!parsed.economy) {
    status = report_diagnostics(parsed.diagnostics, parsed.parse_error);
    return std::nullopt;
  }
  status = kExitOk;
  return std::move(parsed.economy);
}

int cmd_validate(const std::string& economy_path) {
  int status = kExitOk;
  (void)load_economy(economy_path, status);
  return status;
}

int cmd_plan(const std::string& economy_path, const std::string& plan_path,
             const std::string& out_path, bool audit, int workers) {
  int status = kExitOk;
  auto eco = load_economy(economy_path, status);
  if (!eco) return status;

  circloop::PlanParse plan;
  try {
    plan = circloop::parse_plan(read_file(plan_path), *eco);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  if (!plan.plan) return report_diagnostics(plan.diagnostics, plan.parse_error);

  circloop::PlanOutcome outcome;
  try {
    outcome = circloop::run_plan(*eco, *plan.plan, audit, workers);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  }

  const std::string json = circloop::result_to_json(*eco, *plan.plan, outcome).dump(2) + "\n";
  write_output(out_path, json);

  std::ostream& summary = out_path.empty() ? std::cerr : std::cout;
  const auto& res = outcome.result;
  summary << "algorithm: " << res.algorithm << "\n"
          << "score:     " << circloop::format_g9(res.evaluation.score)
          << (res.evaluation.feasible() ? "  (feasible)" : "  (infeasible, excess " +
                  circloop::format_g9(res.evaluation.total_violation) + ")")
          << "\n"
          << "moves:     " << res.moves.size() << "\n";
  for (const auto& m : res.moves)
    summary << "  " << eco->products[m.owner].name << "[" << m.slot << "]: "
            << eco->products[m.from].name << " -> " << eco->products[m.to].name << "\n";
  summary << "circularity: " << circloop::format_g9(outcome.circularity) << "\n"
          << "nodes:     " << res.nodes << "\n"
          << "wall:      " << circloop::format_g9(res.wall_ms) << " ms\n";
  return kExitOk;
}

int cmd_gen(const circloop::GenParams& params, const std::string& out_path) {
  try {
    write_output(out_path, circloop::generate_economy(params).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}

int cmd_report(const std::string& economy_path, const std::string& result_path,
               const std::string& out_path) {
  int status = kExitOk;
  auto eco = load_economy(economy_path, status);
  if (!eco) return status;

  circloop::ResultParse result;
  try {
    result = circloop::parse_result(read_file(result_path), *eco);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  if (!result.result) return report_diagnostics(result.diagnostics, result.parse_error);

  try {
    write_output(out_path, circloop::render_report(*eco, *result.result));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circular economy planning toolkit"};
  app.require_subcommand(1);

  std::string economy_path, plan_path, result_path, out_path;
  bool audit = false;
  int workers = 1;
  circloop::GenParams gen_params;

  auto* validate = app.add_subcommand("validate", "check an economy document");
  validate->add_option("economy", economy_path, "economy JSON file")->required();

  auto* plan = app.add_subcommand("plan", "search for the best configuration");
  plan->add_option("economy", economy_path, "economy JSON file")->required();
  plan->add_option("plan", plan_path, "plan JSON file")->required();
  plan->add_option("-o,--output", out_path, "write the result JSON here (default: stdout)");
  plan->add_flag("--audit", audit, "re-derive all caches from scratch after every move");
  plan->add_option("--workers", workers, "root-parallel MCTS workers")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "generate a random economy");
  gen->add_option("--seed", gen_params.seed, "random seed");
  gen->add_option("--materials", gen_params.materials, "number of raw materials")
      ->check(CLI::PositiveNumber);
  gen->add_option("--levels", gen_params.levels, "layers above the raw wrappers")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--per-level", gen_params.per_level, "products per layer")
      ->check(CLI::PositiveNumber);
  gen->add_option("--class-size", gen_params.class_size, "substitutes per feature class")
      ->check(CLI::PositiveNumber);
  gen->add_option("--max-inputs", gen_params.max_inputs, "maximum inputs per product")
      ->check(CLI::PositiveNumber);
  gen->add_option("--byproduct-rate", gen_params.byproduct_rate,
                  "probability a product declares a byproduct")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("-o,--output", out_path, "write the economy JSON here (default: stdout)");

  auto* report = app.add_subcommand("report", "render CSV tables for a plan result");
  report->add_option("economy", economy_path, "economy JSON file")->required();
  report->add_option("result", result_path, "plan result JSON file")->required();
  report->add_option("-o,--output", out_path, "write the CSV here (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(economy_path);
    if (plan->parsed()) return cmd_plan(economy_path, plan_path, out_path, audit, workers);
    if (gen->parsed()) return cmd_gen(gen_params, out_path);
    if (report->parsed()) return cmd_report(economy_path, result_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
