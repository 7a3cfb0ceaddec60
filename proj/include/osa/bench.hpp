#pragma once

// Experiment harness: seeded instance generation over a parameter grid,
// evaluation of the three arrangement policies with the planner, and CSV
// reporting normalized against the random baseline.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "osa/lp_model.hpp"
#include "osa/planner.hpp"
#include "osa/random.hpp"
#include "osa/sequence.hpp"
#include "osa/shelf.hpp"
#include "osa/solvers.hpp"
#include "osa/surrogate.hpp"

namespace osa {

struct GridSize {
  int m_x = 0;
  int m_y = 0;
  friend bool operator==(const GridSize&, const GridSize&) = default;
};

inline int objects_for_density(const ShelfGrid& grid, double rho) {
  return static_cast<int>(std::floor(rho * grid.cell_count() + 0.5));
}

// n = round-half-up(rho * cells); push costs uniform on {cost_min..cost_max}
// drawn in id order; suction = psi * push; p_l proportional to n + 1 - l.
inline ProblemInstance generate_instance(const ShelfGrid& grid, double rho, double psi, double c_removal,
                                         std::uint64_t seed, int cost_min = 1, int cost_max = 10) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error("density must lie in (0, 1]");
  if (!(psi >= 1.0)) throw Error("cost ratio must be at least 1");
  if (cost_min < 0 || cost_max < cost_min) throw Error("invalid push cost range");
  const int n = objects_for_density(grid, rho);
  if (n < 1) throw Error("density yields no objects on this shelf");
  if (n > grid.cell_count()) throw Error("density yields more objects than cells");
  Xoshiro256StarStar rng(seed);
  std::vector<ObjectSpec> objects;
  for (int l = 1; l <= n; ++l) {
    const double c_push = static_cast<double>(rng.uniform_int(cost_min, cost_max));
    objects.push_back({l, static_cast<double>(n + 1 - l), c_push, psi * c_push});
  }
  return ProblemInstance(grid, std::move(objects), c_removal);
}

enum class Policy { Random, PriorityGreedy, OsaBnb };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::Random:
      return "random";
    case Policy::PriorityGreedy:
      return "priority_greedy";
    case Policy::OsaBnb:
      return "osa_bnb";
  }
  return "?";
}

inline constexpr Policy kPolicies[] = {Policy::Random, Policy::PriorityGreedy, Policy::OsaBnb};

struct ExperimentConfig {
  std::vector<GridSize> grids{{3, 3}, {4, 3}, {4, 4}};
  std::vector<double> densities{0.3, 0.5, 0.7};
  std::vector<double> psis{1.3};
  std::vector<double> removal_penalties{100.0};
  int cost_min = 1;
  int cost_max = 10;
  // Only "linear" (p_l proportional to n + 1 - l) is implemented.
  std::string priority_scheme = "linear";
  int replicates = 5;
  std::uint64_t base_seed = 1;
  PlannerOptions planner;
  // Node cap instead of wall-clock limits so runs repeat exactly.
  SolverConfig solver{.node_limit = 1'000'000};
  // Aggregate as mean of per-replicate ratios instead of ratio of means.
  bool mean_of_ratios = false;
  bool timing_columns = false;

  void validate() const {
    if (grids.empty() || densities.empty() || psis.empty() || removal_penalties.empty()) {
      throw Error("experiment parameter lists must not be empty");
    }
    for (double rho : densities) {
      if (!(rho > 0.0 && rho <= 1.0)) throw Error("density must lie in (0, 1]");
    }
    for (double psi : psis) {
      if (!(psi >= 1.0)) throw Error("cost ratio must be at least 1");
    }
    for (double cr : removal_penalties) {
      if (!(cr >= 0.0)) throw Error("removal penalty must be non-negative");
    }
    if (priority_scheme != "linear") throw Error("unknown priority scheme " + priority_scheme);
    if (replicates < 1) throw Error("replicates must be positive");
  }
};

// One point of the parameter grid.
struct GridCell {
  int index = 0;
  GridSize grid;
  double rho = 0.0;
  double psi = 0.0;
  double c_removal = 0.0;
};

inline std::vector<GridCell> enumerate_cells(const ExperimentConfig& config) {
  std::vector<GridCell> cells;
  for (const GridSize& g : config.grids) {
    for (double rho : config.densities) {
      for (double psi : config.psis) {
        for (double cr : config.removal_penalties) {
          cells.push_back({static_cast<int>(cells.size()), g, rho, psi, cr});
        }
      }
    }
  }
  return cells;
}

// Independent seeds for one (cell, replicate) task.
struct TaskSeeds {
  std::uint64_t task = 0;
  std::uint64_t instance = 0;
  std::uint64_t random = 0;
  std::uint64_t greedy = 0;
  std::uint64_t episodes = 0;
};

inline TaskSeeds task_seeds(std::uint64_t base, int cell, int replicate) {
  TaskSeeds s;
  s.task = derive_seed(base, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(replicate));
  SplitMix64 sm(s.task);
  s.instance = sm.next();
  s.random = sm.next();
  s.greedy = sm.next();
  s.episodes = sm.next();
  return s;
}

inline Arrangement produce_arrangement(const ProblemInstance& instance, Policy policy, const TaskSeeds& seeds,
                                       const SolverConfig& solver, SolveResult* solve = nullptr) {
  switch (policy) {
    case Policy::Random:
      return arrange_random(instance, seeds.random);
    case Policy::PriorityGreedy:
      return arrange_priority_greedy(instance, seeds.greedy);
    case Policy::OsaBnb: {
      SolverConfig config = solver;
      config.objective = Objective::Surrogate;
      SolveResult result = solve_osa_bnb(instance, config);
      if (solve != nullptr) *solve = result;
      return result.arrangement;
    }
  }
  throw Error("unknown policy");
}

struct ExperimentRecord {
  GridCell cell;
  int replicate = 0;
  std::uint64_t seed = 0;
  int n = 0;
  Policy policy = Policy::Random;
  Arrangement arrangement;
  double expected_cost = 0.0;
  double surrogate_cost = 0.0;
  double expected_removals = 0.0;
  bool fallback = false;
  bool proved_optimal = false;
  double solve_seconds = 0.0;
  double plan_seconds = 0.0;
  // Every retrieval plan behind expected_cost, index id - 1.
  std::vector<RetrievalPlan> plans;
};

struct CellSummary {
  GridCell cell;
  int replicates = 0;
  double mean_cost[3] = {0.0, 0.0, 0.0};
  double percent[3] = {0.0, 0.0, 0.0};
  int fallbacks = 0;
};

struct GridResult {
  std::vector<ExperimentRecord> records;
  std::vector<CellSummary> summaries;
};

inline ExperimentRecord evaluate_policy(const ProblemInstance& instance, const GridCell& cell, int replicate,
                                        const TaskSeeds& seeds, Policy policy, const ExperimentConfig& config) {
  using clock = std::chrono::steady_clock;
  ExperimentRecord rec;
  rec.cell = cell;
  rec.replicate = replicate;
  rec.seed = seeds.task;
  rec.n = instance.n();
  rec.policy = policy;
  const auto t0 = clock::now();
  SolveResult solve;
  rec.arrangement = produce_arrangement(instance, policy, seeds, config.solver, &solve);
  rec.proved_optimal = policy == Policy::OsaBnb && solve.proved_optimal;
  const auto t1 = clock::now();
  ExpectedCostResult ec = expected_cost(instance, rec.arrangement, config.planner);
  const auto t2 = clock::now();
  rec.expected_cost = ec.expected_cost;
  rec.fallback = ec.any_fallback;
  rec.surrogate_cost = surrogate_objective(instance, rec.arrangement);
  for (int id = 1; id <= instance.n(); ++id) {
    const RetrievalPlan& plan = ec.plans[id - 1];
    const double removals = plan.method == PlanMethod::Exact ? static_cast<double>(plan.removed().size())
                                                             : static_cast<double>(plan.surrogate_removals);
    rec.expected_removals += instance.p(id) * removals;
  }
  rec.plans = std::move(ec.plans);
  rec.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.plan_seconds = std::chrono::duration<double>(t2 - t1).count();
  return rec;
}

namespace detail {

inline std::vector<CellSummary> summarize(const std::vector<GridCell>& cells,
                                          const std::vector<ExperimentRecord>& records, bool mean_of_ratios) {
  std::vector<CellSummary> out;
  for (const GridCell& cell : cells) {
    CellSummary s;
    s.cell = cell;
    double sums[3] = {0.0, 0.0, 0.0};
    double ratio_sums[3] = {0.0, 0.0, 0.0};
    int ratio_count = 0;
    // Records are stored replicate-major with the three policies in order.
    std::vector<const ExperimentRecord*> mine;
    for (const ExperimentRecord& r : records) {
      if (r.cell.index == cell.index) mine.push_back(&r);
    }
    for (std::size_t k = 0; k + 2 < mine.size(); k += 3) {
      const double random_cost = mine[k]->expected_cost;
      for (int p = 0; p < 3; ++p) {
        sums[p] += mine[k + p]->expected_cost;
        s.fallbacks += mine[k + p]->fallback ? 1 : 0;
      }
      if (random_cost > 0.0) {
        for (int p = 0; p < 3; ++p) ratio_sums[p] += mine[k + p]->expected_cost / random_cost;
        ++ratio_count;
      }
      ++s.replicates;
    }
    for (int p = 0; p < 3; ++p) {
      s.mean_cost[p] = sums[p] / s.replicates;
      if (mean_of_ratios) {
        s.percent[p] = ratio_count > 0 ? 100.0 * ratio_sums[p] / ratio_count : std::nan("");
      } else {
        s.percent[p] = s.mean_cost[0] > 0.0 ? 100.0 * s.mean_cost[p] / s.mean_cost[0] : std::nan("");
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

// Runs every cell and replicate sequentially; records come out ordered by
// cell, then replicate, then policy.
inline GridResult run_grid(const ExperimentConfig& config,
                           const std::function<void(const ExperimentRecord&)>& on_record = {}) {
  config.validate();
  GridResult result;
  const std::vector<GridCell> cells = enumerate_cells(config);
  for (const GridCell& cell : cells) {
    const ShelfGrid grid(cell.grid.m_x, cell.grid.m_y);
    for (int r = 0; r < config.replicates; ++r) {
      const TaskSeeds seeds = task_seeds(config.base_seed, cell.index, r);
      const ProblemInstance instance = generate_instance(grid, cell.rho, cell.psi, cell.c_removal, seeds.instance,
                                                         config.cost_min, config.cost_max);
      for (Policy policy : kPolicies) {
        result.records.push_back(evaluate_policy(instance, cell, r, seeds, policy, config));
        if (on_record) on_record(result.records.back());
      }
    }
  }
  result.summaries = detail::summarize(cells, result.records, config.mean_of_ratios);
  return result;
}

// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  return format_number(v);
}

// "i:j" pairs in object id order, separated by ';'.
inline std::string encode_arrangement(const Arrangement& arr) {
  std::string s;
  for (const Cell& c : arr.cells()) {
    if (!s.empty()) s += ';';
    s += std::to_string(c.i) + ":" + std::to_string(c.j);
  }
  return s;
}

inline Arrangement decode_arrangement(const std::string& text) {
  std::vector<Cell> cells;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error("malformed arrangement entry " + item);
    cells.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
  }
  return Arrangement(std::move(cells));
}

inline void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, bool timing) {
  out << "m_x,m_y,density,psi,c_removal,replicate,seed,n,policy,expected_cost,surrogate_cost,"
         "expected_removals,fallback,proved_optimal,arrangement";
  if (timing) out << ",solve_seconds,plan_seconds";
  out << "\r\n";
  for (const ExperimentRecord& r : records) {
    out << r.cell.grid.m_x << ',' << r.cell.grid.m_y << ',' << csv_number(r.cell.rho) << ','
        << csv_number(r.cell.psi) << ',' << csv_number(r.cell.c_removal) << ',' << r.replicate << ',' << r.seed
        << ',' << r.n << ',' << to_string(r.policy) << ',' << csv_number(r.expected_cost) << ','
        << csv_number(r.surrogate_cost) << ',' << csv_number(r.expected_removals) << ',' << (r.fallback ? 1 : 0)
        << ',' << (r.proved_optimal ? 1 : 0) << ',' << csv_field(encode_arrangement(r.arrangement));
    if (timing) out << ',' << csv_number(r.solve_seconds) << ',' << csv_number(r.plan_seconds);
    out << "\r\n";
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summaries) {
  out << "m_x,m_y,density,psi,c_removal,replicates,mean_random,mean_priority_greedy,mean_osa_bnb,"
         "pct_random,pct_priority_greedy,pct_osa_bnb,fallbacks\r\n";
  for (const CellSummary& s : summaries) {
    out << s.cell.grid.m_x << ',' << s.cell.grid.m_y << ',' << csv_number(s.cell.rho) << ','
        << csv_number(s.cell.psi) << ',' << csv_number(s.cell.c_removal) << ',' << s.replicates;
    for (double v : s.mean_cost) out << ',' << csv_number(v);
    for (double v : s.percent) out << ',' << csv_number(v);
    out << ',' << s.fallbacks << "\r\n";
  }
}

struct SequentialCurve {
  GridCell cell;
  Policy policy = Policy::Random;
  std::vector<double> mean_cumulative;
  std::vector<double> percent;  // relative to the random curve, step by step
};

struct SequentialResult {
  std::vector<SequentialCurve> curves;
  std::vector<EpisodeTrace> traces;  // cell-major, then replicate, then policy
};

// Percent of the random curve; 0/0 counts as 100 so that identical zero
// curves normalize like any other identical curves.
inline double relative_percent(double value, double reference) {
  if (reference > 0.0) return 100.0 * value / reference;
  return value == 0.0 ? 100.0 : std::nan("");
}

// One episode per (replicate, policy); all three policies of a replicate use
// the same episode seed.
inline SequentialResult run_sequential(const ExperimentConfig& config) {
  config.validate();
  SequentialResult result;
  for (const GridCell& cell : enumerate_cells(config)) {
    const ShelfGrid grid(cell.grid.m_x, cell.grid.m_y);
    std::vector<EpisodeTrace> per_policy[3];
    for (int r = 0; r < config.replicates; ++r) {
      const TaskSeeds seeds = task_seeds(config.base_seed, cell.index, r);
      const ProblemInstance instance = generate_instance(grid, cell.rho, cell.psi, cell.c_removal, seeds.instance,
                                                         config.cost_min, config.cost_max);
      for (int p = 0; p < 3; ++p) {
        const Arrangement arr = produce_arrangement(instance, kPolicies[p], seeds, config.solver);
        EpisodeTrace trace = run_episode(instance, arr, seeds.episodes, config.planner);
        per_policy[p].push_back(trace);
        result.traces.push_back(std::move(trace));
      }
    }
    std::vector<double> curves[3];
    for (int p = 0; p < 3; ++p) curves[p] = cumulative_cost_curve(per_policy[p]);
    for (int p = 0; p < 3; ++p) {
      SequentialCurve c;
      c.cell = cell;
      c.policy = kPolicies[p];
      c.mean_cumulative = curves[p];
      for (std::size_t k = 0; k < curves[p].size(); ++k) {
        const double reference = k < curves[0].size() ? curves[0][k] : std::nan("");
        c.percent.push_back(relative_percent(curves[p][k], reference));
      }
      result.curves.push_back(std::move(c));
    }
  }
  return result;
}

inline void write_sequential_csv(std::ostream& out, const std::vector<SequentialCurve>& curves) {
  out << "m_x,m_y,density,psi,c_removal,policy,step,mean_cumulative_cost,pct_of_random\r\n";
  for (const SequentialCurve& c : curves) {
    for (std::size_t k = 0; k < c.mean_cumulative.size(); ++k) {
      out << c.cell.grid.m_x << ',' << c.cell.grid.m_y << ',' << csv_number(c.cell.rho) << ','
          << csv_number(c.cell.psi) << ',' << csv_number(c.cell.c_removal) << ',' << to_string(c.policy) << ','
          << k + 1 << ',' << csv_number(c.mean_cumulative[k]) << ',' << csv_number(c.percent[k]) << "\r\n";
    }
  }
}

}  // namespace osa
