// osa_bench: instance generation, solving, evaluation, LP export and the
// experiment grids from the command line.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "osa/bench.hpp"
#include "osa/io.hpp"
#include "osa/lp_model.hpp"
#include "osa/planner.hpp"
#include "osa/sequence.hpp"
#include "osa/solvers.hpp"
#include "osa/surrogate.hpp"
#include "osa/theorems.hpp"

namespace {

using osa::Json;

// "3x3" -> {3, 3}
osa::GridSize parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw osa::Error("grid must look like 4x3, got " + text);
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw osa::Error("grid must look like 4x3, got " + text);
  }
}

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw osa::Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw osa::Error("write to " + path + " failed");
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw osa::Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw osa::Error(path + ": " + e.what());
  }
}

// An instance comes either from a JSON file or from the generator flags.
struct InstanceSource {
  std::string file;
  std::string grid = "4x4";
  double density = 0.5;
  double psi = 1.3;
  double c_removal = 100.0;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--instance", file, "Instance JSON file (overrides the generator flags)");
    cmd->add_option("--grid", grid, "Shelf size MXxMY for a generated instance")->capture_default_str();
    cmd->add_option("--density", density, "Shelf density for a generated instance")->capture_default_str();
    cmd->add_option("--psi", psi, "Suction-to-push cost ratio for a generated instance")->capture_default_str();
    cmd->add_option("--cr", c_removal, "Removal penalty for a generated instance")->capture_default_str();
    cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  }

  osa::ProblemInstance load() const {
    if (!file.empty()) return osa::instance_from_json(read_json(file));
    const osa::GridSize g = parse_grid(grid);
    return osa::generate_instance(osa::ShelfGrid(g.m_x, g.m_y), density, psi, c_removal, seed);
  }
};

struct PlannerFlags {
  double budget = 60.0;
  std::uint64_t max_expansions = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--budget-per-target", budget, "A* wall-clock budget per target, seconds")
        ->capture_default_str();
    cmd->add_option("--max-expansions", max_expansions, "A* expansion cap per target, 0 for none")
        ->capture_default_str();
  }

  osa::PlannerOptions options() const {
    osa::PlannerOptions o;
    o.time_budget_s = budget;
    o.max_expansions = max_expansions;
    return o;
  }
};

struct GridFlags {
  std::vector<std::string> grids{"3x3", "4x3", "4x4"};
  std::vector<double> densities{0.3, 0.5, 0.7};
  std::vector<double> psis{1.3};
  std::vector<double> penalties{100.0};
  int replicates = 5;
  std::uint64_t seed = 1;
  std::uint64_t node_limit = 1'000'000;
  bool mean_of_ratios = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid", grids, "Shelf sizes, e.g. 3x3 4x4")->delimiter(',')->capture_default_str();
    cmd->add_option("--density", densities, "Densities")->delimiter(',')->capture_default_str();
    cmd->add_option("--psi", psis, "Suction-to-push cost ratios")->delimiter(',')->capture_default_str();
    cmd->add_option("--cr", penalties, "Removal penalties")->delimiter(',')->capture_default_str();
    cmd->add_option("--replicates", replicates, "Replicates per grid cell")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
    cmd->add_option("--node-limit", node_limit, "Branch-and-bound node cap, 0 for none")->capture_default_str();
    cmd->add_flag("--mean-of-ratios", mean_of_ratios, "Normalize per replicate before averaging");
  }

  osa::ExperimentConfig config(const PlannerFlags& planner) const {
    osa::ExperimentConfig c;
    c.grids.clear();
    for (const std::string& g : grids) c.grids.push_back(parse_grid(g));
    c.densities = densities;
    c.psis = psis;
    c.removal_penalties = penalties;
    c.replicates = replicates;
    c.base_seed = seed;
    c.solver.node_limit = node_limit;
    c.planner = planner.options();
    c.mean_of_ratios = mean_of_ratios;
    return c;
  }
};

std::string with_suffix(const std::string& prefix, const std::string& suffix) {
  if (prefix.empty() || prefix == "-") return "";
  return prefix + suffix;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal shelf arrangement: solver, evaluator and experiment harness"};
  app.require_subcommand(1);

  // generate
  InstanceSource gen_src;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Write a generated instance as JSON");
  gen_src.attach(generate);
  generate->add_option("--out", gen_out, "Output file (default stdout)");

  // solve
  InstanceSource solve_src;
  PlannerFlags solve_planner;
  std::string solve_out;
  std::string objective = "surrogate";
  std::string method = "bnb";
  double solve_budget = 500.0;
  double patience = 90.0;
  std::uint64_t solve_nodes = 0;
  bool no_removal = false;
  CLI::App* solve = app.add_subcommand("solve", "Compute an arrangement for one instance");
  solve_src.attach(solve);
  solve_planner.attach(solve);
  solve->add_option("--objective", objective, "surrogate or true_cost")
      ->check(CLI::IsMember({"surrogate", "true_cost"}))
      ->capture_default_str();
  solve->add_option("--method", method, "bnb, bruteforce, random or greedy")
      ->check(CLI::IsMember({"bnb", "bruteforce", "random", "greedy"}))
      ->capture_default_str();
  solve->add_option("--budget", solve_budget, "Branch-and-bound wall-clock budget, seconds")->capture_default_str();
  solve->add_option("--patience", patience, "Stop after this long without a better incumbent, seconds")
      ->capture_default_str();
  solve->add_option("--node-limit", solve_nodes, "Branch-and-bound node cap, 0 for none")->capture_default_str();
  solve->add_flag("--no-removal", no_removal, "Forbid arrangements that need removals");
  solve->add_option("--out", solve_out, "Output file (default stdout)");

  // evaluate
  InstanceSource eval_src;
  PlannerFlags eval_planner;
  std::string eval_arrangement;
  std::string eval_out;
  bool breakdown = false;
  bool eval_timing = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Surrogate and true expected cost of an arrangement");
  eval_src.attach(evaluate);
  eval_planner.attach(evaluate);
  evaluate->add_option("--arrangement", eval_arrangement, "Arrangement JSON (a solve result works)")->required();
  evaluate->add_flag("--breakdown", breakdown, "Include the surrogate's per-cell quantities");
  evaluate->add_flag("--timing", eval_timing, "Include planner wall-clock times");
  evaluate->add_option("--out", eval_out, "Output file (default stdout)");

  // export-lp
  InstanceSource lp_src;
  std::string lp_out;
  std::string lp_point_arrangement;
  std::string lp_point_out;
  CLI::App* export_lp = app.add_subcommand("export-lp", "Write the linearized program in CPLEX LP format");
  lp_src.attach(export_lp);
  export_lp->add_option("--out", lp_out, "Output file (default stdout)");
  export_lp->add_option("--point-from", lp_point_arrangement, "Arrangement JSON to build a feasible point from");
  export_lp->add_option("--point-out", lp_point_out, "Where to write that point as name/value lines");

  // verify-lp-solution
  InstanceSource verify_src;
  std::string solution_file;
  double tolerance = 1e-6;
  CLI::App* verify = app.add_subcommand("verify-lp-solution", "Check a solution file against the program");
  verify_src.attach(verify);
  verify->add_option("--solution", solution_file, "Lines of 'name value'")->required();
  verify->add_option("--tol", tolerance, "Absolute tolerance")->capture_default_str();

  // grid
  GridFlags grid_flags;
  PlannerFlags grid_planner;
  std::string grid_out;
  bool grid_timing = false;
  CLI::App* grid = app.add_subcommand("grid", "Policy comparison over a parameter grid");
  grid_flags.attach(grid);
  grid_planner.attach(grid);
  grid->add_option("--out", grid_out, "Output prefix: writes PREFIX_records.csv and PREFIX_summary.csv");
  grid->add_flag("--timing", grid_timing, "Add solver and planner time columns");

  // sequential
  GridFlags seq_flags;
  PlannerFlags seq_planner;
  std::string seq_out;
  std::string seq_traces;
  CLI::App* sequential = app.add_subcommand("sequential", "Cumulative cost over sequential retrievals");
  seq_flags.attach(sequential);
  seq_planner.attach(sequential);
  sequential->add_option("--out", seq_out, "Output CSV (default stdout)");
  sequential->add_option("--traces", seq_traces, "Also write every episode trace as JSON");

  // theorem-check
  std::vector<std::string> suites;
  CLI::App* theorem = app.add_subcommand("theorem-check", "Run the property suites");
  theorem->add_option("--suite", suites, "Subset to run")
      ->check(CLI::IsMember({"removal_free", "lp_roundtrip", "oracle", "constant_gap", "chain", "misselection"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      emit(gen_out, osa::to_json(gen_src.load()).dump(2) + "\n");
    } else if (*solve) {
      const osa::ProblemInstance instance = solve_src.load();
      const osa::Objective obj = objective == "surrogate" ? osa::Objective::Surrogate : osa::Objective::TrueCost;
      osa::SolveResult result;
      if (method == "bnb") {
        osa::SolverConfig config;
        config.objective = obj;
        config.time_budget_s = solve_budget;
        config.incumbent_patience_s = patience;
        config.node_limit = solve_nodes;
        config.no_removal_constraint = no_removal;
        config.planner = solve_planner.options();
        result = osa::solve_osa_bnb(instance, config);
      } else if (method == "bruteforce") {
        result = osa::solve_bruteforce(instance, obj, {}, solve_planner.options());
      } else {
        result.arrangement = method == "random" ? osa::arrange_random(instance, solve_src.seed)
                                                : osa::arrange_priority_greedy(instance, solve_src.seed);
        result.objective_value = osa::objective_value(instance, result.arrangement, obj, solve_planner.options());
      }
      Json j = osa::to_json(result.arrangement);
      j["method"] = method;
      j["objective"] = osa::to_string(obj);
      j["objective_value"] = result.objective_value;
      j["proved_optimal"] = result.proved_optimal;
      j["nodes"] = result.nodes;
      emit(solve_out, j.dump(2) + "\n");
    } else if (*evaluate) {
      const osa::ProblemInstance instance = eval_src.load();
      const osa::Arrangement arr = osa::arrangement_from_json(read_json(eval_arrangement));
      arr.check(instance);
      const osa::ExpectedCostResult ec = osa::expected_cost(instance, arr, eval_planner.options());
      Json plans = Json::array();
      for (const osa::RetrievalPlan& p : ec.plans) plans.push_back(osa::to_json(p, eval_timing));
      Json j;
      j["expected_cost"] = ec.expected_cost;
      j["any_fallback"] = ec.any_fallback;
      j["surrogate"] = osa::to_json(osa::evaluate_surrogate(instance, arr), breakdown);
      j["plans"] = plans;
      emit(eval_out, j.dump(2) + "\n");
    } else if (*export_lp) {
      const osa::ProblemInstance instance = lp_src.load();
      const osa::LpModel model = osa::build_model(instance);
      emit(lp_out, osa::write_lp(model));
      if (!lp_point_arrangement.empty()) {
        const osa::Arrangement arr = osa::arrangement_from_json(read_json(lp_point_arrangement));
        arr.check(instance);
        std::ostringstream os;
        for (const auto& [name, value] : osa::feasible_point(instance, arr)) {
          os << name << " " << osa::format_number(value) << "\n";
        }
        emit(lp_point_out, os.str());
      }
    } else if (*verify) {
      const osa::ProblemInstance instance = verify_src.load();
      std::ifstream in(solution_file);
      if (!in) throw osa::Error("cannot open " + solution_file);
      const osa::LpCheck check = osa::verify_solution(osa::build_model(instance), osa::parse_solution(in), tolerance);
      std::cout << "objective " << osa::format_number(check.objective) << "\n";
      for (const osa::LpViolation& v : check.violations) {
        std::cout << "violated " << v.row << " lhs " << osa::format_number(v.lhs) << " rhs "
                  << osa::format_number(v.rhs) << "\n";
      }
      std::cout << (check.feasible() ? "feasible" : "infeasible") << "\n";
      return check.feasible() ? 0 : 1;
    } else if (*grid) {
      const osa::ExperimentConfig config = grid_flags.config(grid_planner);
      const osa::GridResult result = osa::run_grid(config);
      std::ostringstream records;
      std::ostringstream summary;
      osa::write_records_csv(records, result.records, grid_timing);
      osa::write_summary_csv(summary, result.summaries);
      if (grid_out.empty() || grid_out == "-") {
        std::cout << records.str() << "\n" << summary.str();
      } else {
        emit(with_suffix(grid_out, "_records.csv"), records.str());
        emit(with_suffix(grid_out, "_summary.csv"), summary.str());
      }
    } else if (*sequential) {
      const osa::ExperimentConfig config = seq_flags.config(seq_planner);
      const osa::SequentialResult result = osa::run_sequential(config);
      std::ostringstream csv;
      osa::write_sequential_csv(csv, result.curves);
      emit(seq_out, csv.str());
      if (!seq_traces.empty()) {
        // Traces come out cell-major, then replicate, then policy.
        Json all = Json::array();
        std::size_t k = 0;
        for (const osa::GridCell& cell : osa::enumerate_cells(config)) {
          const osa::ShelfGrid g(cell.grid.m_x, cell.grid.m_y);
          for (int r = 0; r < config.replicates; ++r) {
            for (osa::Policy policy : osa::kPolicies) {
              Json t = osa::to_json(result.traces[k++], g);
              t["m_x"] = cell.grid.m_x;
              t["m_y"] = cell.grid.m_y;
              t["density"] = cell.rho;
              t["replicate"] = r;
              t["policy"] = osa::to_string(policy);
              all.push_back(std::move(t));
            }
          }
        }
        emit(seq_traces, all.dump(2) + "\n");
      }
    } else if (*theorem) {
      auto wanted = [&](const char* name) {
        return suites.empty() || std::find(suites.begin(), suites.end(), name) != suites.end();
      };
      std::vector<osa::SuiteResult> results;
      osa::PlanAudit audit;
      if (wanted("removal_free")) results.push_back(osa::removal_free_suite());
      if (wanted("lp_roundtrip")) results.push_back(osa::lp_roundtrip_suite());
      if (wanted("oracle")) results.push_back(osa::oracle_equivalence_suite());
      if (wanted("constant_gap")) results.push_back(osa::constant_gap_suite(50, 31, 10.0, &audit));
      if (wanted("chain")) results.push_back(osa::gap_chain_suite(100, 47, 1e-9, &audit));
      if (wanted("misselection")) results.push_back(osa::misselection_suite(&audit));
      bool ok = true;
      for (const osa::SuiteResult& r : results) {
        ok = ok && r.passed();
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " cases=" << r.cases
                  << " failures=" << r.failures;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << "\n";
      }
      std::cout << "plans audited " << audit.exact << " exact, " << audit.violations << " bound violations\n";
      ok = ok && audit.violations == 0;
      return ok ? 0 : 1;
    }
  } catch (const osa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
