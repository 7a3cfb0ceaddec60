#pragma once

// Property suites over small random instances: removal-free existence,
// LP feasibility of the surrogate point, exact solver agreement, surrogate
// exactness under constant cost gaps, the suboptimality-gap chain, and the
// two hand-built misselection instances.
//
// Every suite is deterministic given its seed and emits a text artifact that
// repeated runs must reproduce byte for byte.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "osa/bench.hpp"
#include "osa/lp_model.hpp"
#include "osa/planner.hpp"
#include "osa/random.hpp"
#include "osa/shelf.hpp"
#include "osa/solvers.hpp"
#include "osa/surrogate.hpp"

namespace osa {

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  // Cases whose optimal cost is positive, where the check has teeth.
  int nontrivial = 0;
  std::string detail;
  double seconds = 0.0;
  // Deterministic record of every case, one line each.
  std::string artifact;

  bool passed() const { return failures == 0 && cases > 0; }
};

// Collects root_heuristic <= total_cost <= surrogate_cost over exact plans.
struct PlanAudit {
  std::uint64_t plans = 0;
  std::uint64_t exact = 0;
  std::uint64_t violations = 0;
  std::string first_violation;

  void check(const RetrievalPlan& plan) {
    ++plans;
    if (plan.method != PlanMethod::Exact) return;
    ++exact;
    if (plan.root_heuristic <= plan.total_cost && plan.total_cost <= plan.surrogate_cost) return;
    if (violations++ == 0) {
      std::ostringstream os;
      os << "target " << plan.target << ": h=" << format_number(plan.root_heuristic)
         << " cost=" << format_number(plan.total_cost) << " surrogate=" << format_number(plan.surrogate_cost);
      first_violation = os.str();
    }
  }

  void check(const std::vector<RetrievalPlan>& plans_in) {
    for (const RetrievalPlan& p : plans_in) check(p);
  }
};

namespace detail {

class SuiteTimer {
 public:
  SuiteTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void fail(SuiteResult& r, const std::string& what) {
  if (r.failures++ == 0) r.detail = what;
}

inline std::string describe(const ProblemInstance& instance) {
  std::ostringstream os;
  os << instance.grid().m_x() << "x" << instance.grid().m_y() << " n=" << instance.n()
     << " cr=" << format_number(instance.c_removal());
  for (const ObjectSpec& o : instance.objects()) {
    os << " [" << o.id << " p=" << format_number(o.p) << " " << format_number(o.c_push) << "/"
       << format_number(o.c_suction) << "]";
  }
  return os.str();
}

// Grids from 2x2 up to 3x3.
inline ShelfGrid small_grid(Xoshiro256StarStar& rng) {
  static constexpr GridSize kGrids[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};
  const GridSize g = kGrids[rng.uniform_below(4)];
  return ShelfGrid(g.m_x, g.m_y);
}

}  // namespace detail

// Random composition of `total` into n positive integer parts. With a
// power-of-two total the normalized probabilities are dyadic, so expected
// costs over integer action costs are computed without rounding.
inline std::vector<int> random_composition(int n, int total, Xoshiro256StarStar& rng) {
  if (n < 1 || total < n) throw Error("cannot split total into n positive parts");
  std::vector<int> cuts(total - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  cuts = sample_without_replacement(std::move(cuts), n - 1, rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> parts;
  int prev = 0;
  for (int c : cuts) {
    parts.push_back(c - prev);
    prev = c;
  }
  parts.push_back(total - prev);
  return parts;
}

// Push costs U{cost_min..cost_max}, suction = psi * push, dyadic weights.
inline ProblemInstance random_instance(const ShelfGrid& grid, int n, double psi, double c_removal,
                                       Xoshiro256StarStar& rng, int cost_min = 1, int cost_max = 10) {
  const std::vector<int> w = random_composition(n, 64, rng);
  std::vector<ObjectSpec> objects;
  for (int l = 1; l <= n; ++l) {
    const double c = static_cast<double>(rng.uniform_int(cost_min, cost_max));
    objects.push_back({l, static_cast<double>(w[l - 1]), c, psi * c});
  }
  return ProblemInstance(grid, std::move(objects), c_removal);
}

// Integer push costs and one integer gap 0 <= dc <= min push cost shared by
// every object.
inline ProblemInstance random_constant_gap_instance(const ShelfGrid& grid, int n, double c_removal,
                                                    Xoshiro256StarStar& rng, int cost_min = 1, int cost_max = 10) {
  const std::vector<int> w = random_composition(n, 64, rng);
  std::vector<int> push(n);
  for (int& c : push) c = static_cast<int>(rng.uniform_int(cost_min, cost_max));
  const int gap = static_cast<int>(rng.uniform_int(0, *std::min_element(push.begin(), push.end())));
  std::vector<ObjectSpec> objects;
  for (int l = 1; l <= n; ++l) {
    objects.push_back({l, static_cast<double>(w[l - 1]), static_cast<double>(push[l - 1]),
                       static_cast<double>(push[l - 1] + gap)});
  }
  return ProblemInstance(grid, std::move(objects), c_removal);
}

inline Arrangement random_arrangement(const ProblemInstance& instance, Xoshiro256StarStar& rng) {
  return arrange_random(instance, rng.next());
}

// For every grid with at most max_cells cells and every n, enumerates all
// occupancy patterns: some pattern needs no removal iff the shelf is not
// dense. The constructive witness must need none either.
inline SuiteResult removal_free_suite(int max_cells = 9) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "removal_free_existence";
  std::ostringstream art;
  for (int m_x = 1; m_x <= max_cells; ++m_x) {
    for (int m_y = 1; m_x * m_y <= max_cells; ++m_y) {
      const ShelfGrid grid(m_x, m_y);
      const int cells = grid.cell_count();
      for (int n = 1; n <= cells; ++n) {
        std::vector<ObjectSpec> objects;
        for (int l = 1; l <= n; ++l) objects.push_back({l, 1.0, 1.0, 1.0});
        const ProblemInstance instance(grid, objects, 1.0);
        int patterns = 0;
        int free_patterns = 0;
        std::vector<int> occ(cells);
        for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
          if (std::popcount(mask) != n) continue;
          int next = 1;
          for (int k = 0; k < cells; ++k) occ[k] = (mask >> k) & 1u ? next++ : 0;
          ++patterns;
          if (removal_free(evaluate_surrogate(instance, occ))) ++free_patterns;
        }
        const bool dense = is_dense(n, grid);
        ++r.cases;
        art << m_x << "x" << m_y << " n=" << n << " dense=" << dense << " patterns=" << patterns
            << " removal_free=" << free_patterns << "\n";
        if ((free_patterns > 0) == dense) {
          detail::fail(r, std::to_string(m_x) + "x" + std::to_string(m_y) + " n=" + std::to_string(n) +
                              ": dense=" + std::to_string(dense) + " but " + std::to_string(free_patterns) +
                              " removal-free patterns");
        }
        const RemovalFreeResult witness = removal_free_arrangement(instance);
        if (witness.exists == dense ||
            (witness.exists && !removal_free(evaluate_surrogate(instance, *witness.witness)))) {
          detail::fail(r, "witness mismatch on " + std::to_string(m_x) + "x" + std::to_string(m_y) +
                              " n=" + std::to_string(n));
        }
      }
    }
  }
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

// The feasible point assembled from the surrogate breakdown satisfies every
// row of the linear model and reproduces the surrogate objective.
inline SuiteResult lp_roundtrip_suite(int count = 50, std::uint64_t seed = 11, double tol = 1e-9) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "lp_roundtrip";
  std::ostringstream art;
  Xoshiro256StarStar rng(seed);
  const double psis[] = {1.0, 1.3, 2.0};
  const double penalties[] = {0.0, 10.0, 100.0};
  for (int t = 0; t < count; ++t) {
    const ShelfGrid grid(static_cast<int>(rng.uniform_int(1, 4)), static_cast<int>(rng.uniform_int(1, 4)));
    const int n = static_cast<int>(rng.uniform_int(1, grid.cell_count()));
    const double psi = psis[rng.uniform_below(3)];
    const double cr = penalties[rng.uniform_below(3)];
    const ProblemInstance instance = random_instance(grid, n, psi, cr, rng);
    const Arrangement arr = random_arrangement(instance, rng);
    const LpModel model = build_model(instance);
    const LpCheck check = verify_solution(model, feasible_point(instance, arr), 1e-9);
    const double surrogate = surrogate_objective(instance, arr);
    ++r.cases;
    art << t << " " << grid.m_x() << "x" << grid.m_y() << " n=" << n << " rows=" << model.rows.size()
        << " vars=" << model.variables.size() << " violations=" << check.violations.size()
        << " lp=" << format_number(check.objective) << " surrogate=" << format_number(surrogate) << "\n";
    if (!check.violations.empty()) {
      detail::fail(r, "case " + std::to_string(t) + ": " + check.violations.front().row + " violated");
    } else if (!(std::abs(check.objective - surrogate) <= tol)) {
      detail::fail(r, "case " + std::to_string(t) + ": objective " + format_number(check.objective) + " vs " +
                          format_number(surrogate));
    }
  }
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

// Branch and bound against exhaustive enumeration on the surrogate.
inline SuiteResult oracle_equivalence_suite(int count = 216, std::uint64_t seed = 23) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "oracle_equivalence";
  std::ostringstream art;
  art << "case,m_x,m_y,n,psi,c_removal,bnb,bruteforce,bnb_arrangement,bruteforce_arrangement\r\n";
  Xoshiro256StarStar rng(seed);
  const GridSize grids[] = {{1, 3}, {2, 2}, {3, 2}, {2, 3}};
  const double psis[] = {1.0, 1.3, 2.0};
  const double penalties[] = {0.0, 10.0, 100.0};
  for (int t = 0; t < count; ++t) {
    // Cycle the discrete parameters so every combination is covered.
    const GridSize g = grids[t % 4];
    const double psi = psis[(t / 4) % 3];
    const double cr = penalties[(t / 12) % 3];
    const ShelfGrid grid(g.m_x, g.m_y);
    const int n = static_cast<int>(rng.uniform_int(2, std::min(4, grid.cell_count())));
    const ProblemInstance instance = random_instance(grid, n, psi, cr, rng);
    SolverConfig config;
    const SolveResult bnb = solve_osa_bnb(instance, config);
    const SolveResult bf = solve_bruteforce(instance, Objective::Surrogate);
    ++r.cases;
    art << t << "," << g.m_x << "," << g.m_y << "," << n << "," << format_number(psi) << "," << format_number(cr)
        << "," << format_number(bnb.objective_value) << "," << format_number(bf.objective_value) << ","
        << encode_arrangement(bnb.arrangement) << "," << encode_arrangement(bf.arrangement) << "\r\n";
    if (bnb.objective_value != bf.objective_value || !bnb.proved_optimal) {
      detail::fail(r, "case " + std::to_string(t) + " (" + detail::describe(instance) + "): bnb " +
                          format_number(bnb.objective_value) + " vs bruteforce " + format_number(bf.objective_value));
    }
  }
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

// Constant suction-push gap no larger than the cheapest push: the surrogate
// optimum is also optimal for the true cost.
inline SuiteResult constant_gap_suite(int count = 50, std::uint64_t seed = 31, double planner_budget_s = 10.0,
                                      PlanAudit* audit = nullptr) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "constant_gap_exactness";
  std::ostringstream art;
  Xoshiro256StarStar rng(seed);
  const double penalties[] = {0.0, 10.0, 100.0};
  PlannerOptions planner;
  planner.time_budget_s = planner_budget_s;
  for (int t = 0; t < count; ++t) {
    const ShelfGrid grid = detail::small_grid(rng);
    // More objects than columns, so some object always sits behind another.
    const int n = static_cast<int>(rng.uniform_int(grid.m_x() + 1, std::min(5, grid.cell_count())));
    const double cr = penalties[rng.uniform_below(3)];
    const ProblemInstance instance = random_constant_gap_instance(grid, n, cr, rng);
    SolverConfig config;
    config.planner = planner;
    const SolveResult bnb = solve_osa_bnb(instance, config);
    const ExpectedCostResult bnb_true = expected_cost(instance, bnb.arrangement, planner);
    const SolveResult best = solve_bruteforce(instance, Objective::TrueCost, {}, planner);
    const ExpectedCostResult best_true = expected_cost(instance, best.arrangement, planner);
    if (audit != nullptr) {
      audit->check(bnb_true.plans);
      audit->check(best_true.plans);
    }
    ++r.cases;
    if (best.objective_value > 0.0) ++r.nontrivial;
    art << t << " " << detail::describe(instance) << " bnb=" << format_number(bnb_true.expected_cost)
        << " optimum=" << format_number(best.objective_value) << "\n";
    if (bnb_true.any_fallback || best_true.any_fallback) {
      detail::fail(r, "case " + std::to_string(t) + ": planner fell back");
    } else if (bnb_true.expected_cost != best.objective_value) {
      detail::fail(r, "case " + std::to_string(t) + " (" + detail::describe(instance) + "): bnb true cost " +
                          format_number(bnb_true.expected_cost) + " vs optimum " + format_number(best.objective_value));
    }
  }
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

// C(S*) <= C(S_bnb) <= min(Ĉ(consolidate S*), Ĉ(S*)) <= min(k C(S*), Ĉ(S*)).
inline SuiteResult gap_chain_suite(int count = 100, std::uint64_t seed = 47, double tol = 1e-9,
                                   PlanAudit* audit = nullptr) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "suboptimality_chain";
  std::ostringstream art;
  Xoshiro256StarStar rng(seed);
  const double psis[] = {1.0, 1.3, 2.0};
  const double penalties[] = {0.0, 10.0, 100.0};
  PlannerOptions planner;
  planner.time_budget_s = 10.0;
  for (int t = 0; t < count; ++t) {
    const ShelfGrid grid = detail::small_grid(rng);
    // More objects than columns, so some object always sits behind another.
    const int n = static_cast<int>(rng.uniform_int(grid.m_x() + 1, std::min(5, grid.cell_count())));
    const double psi = psis[rng.uniform_below(3)];
    const double cr = penalties[rng.uniform_below(3)];
    const ProblemInstance instance = random_instance(grid, n, psi, cr, rng);
    double k = 1.0;
    for (const ObjectSpec& o : instance.objects()) k = std::max(k, o.c_suction / o.c_push);

    SolverConfig config;
    const SolveResult bnb = solve_osa_bnb(instance, config);
    const SolveResult star = solve_bruteforce(instance, Objective::TrueCost, {}, planner);
    const ExpectedCostResult bnb_true = expected_cost(instance, bnb.arrangement, planner);
    const ExpectedCostResult star_true = expected_cost(instance, star.arrangement, planner);
    if (audit != nullptr) {
      audit->check(bnb_true.plans);
      audit->check(star_true.plans);
    }
    const double c_star = star.objective_value;
    const double c_bnb = bnb_true.expected_cost;
    const double s_star = surrogate_objective(instance, star.arrangement);
    const double s_consol = surrogate_objective(instance, consolidate(star.arrangement, grid));
    const double middle = std::min(s_consol, s_star);
    const double right = std::min(k * c_star, s_star);
    ++r.cases;
    if (c_star > 0.0) ++r.nontrivial;
    art << t << " " << detail::describe(instance) << " C*=" << format_number(c_star)
        << " Cbnb=" << format_number(c_bnb) << " Shat*=" << format_number(s_star)
        << " Shat_consol=" << format_number(s_consol) << " k=" << format_number(k) << "\n";
    const std::string where = "case " + std::to_string(t) + " (" + detail::describe(instance) + "): ";
    if (bnb_true.any_fallback || star_true.any_fallback) {
      detail::fail(r, where + "planner fell back");
    } else if (!(c_star <= c_bnb + tol)) {
      detail::fail(r, where + "C(S*) > C(S_bnb)");
    } else if (!(c_bnb <= middle + tol)) {
      detail::fail(r, where + "C(S_bnb) above the surrogate bound");
    } else if (!(middle <= right + tol)) {
      detail::fail(r, where + "consolidated surrogate above k C(S*)");
    }
  }
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

// One of the two hand-built instances where the surrogate picks a worse
// arrangement than the true cost would.
struct MisselectionCase {
  std::string name;
  ProblemInstance instance;
  std::vector<Placement> fixed;
  int free_object = 0;
  // Cell of the free object in the surrogate's pick and in the true optimum.
  Cell surrogate_pick;
  Cell true_pick;
  // Cost parameters satisfy the conditions under which misselection occurs.
  bool conditions_hold = false;

  Arrangement with_free_at(Cell c) const {
    std::vector<Cell> cells(instance.n());
    for (const Placement& pl : fixed) cells[pl.id - 1] = pl.cell;
    cells[free_object - 1] = c;
    return Arrangement(std::move(cells));
  }
};

// 4x3 shelf. Objects 4, 5, 6 stand in column 2 front to back; object 7 goes
// beside object 4 at (3,1) or one row deeper at (3,2).
inline MisselectionCase suction_detour_case() {
  const double c_r = 100.0;
  std::vector<ObjectSpec> objects = {
      {1, 0.0, 10, 13}, {2, 0.0, 10, 13}, {3, 0.0, 10, 13}, {4, 0.0, 2, 3},   {5, 3.0, 2, 6},
      {6, 2.0, 10, 13}, {7, 0.0, 2, 2},   {8, 0.0, 10, 13}, {9, 5.0, 10, 13}, {10, 0.0, 10, 13},
  };
  ProblemInstance instance(ShelfGrid(4, 3), objects, c_r);
  std::vector<Placement> fixed = {{1, {1, 1}}, {2, {1, 2}}, {3, {1, 3}}, {4, {2, 1}},  {5, {2, 2}},
                                  {6, {2, 3}}, {8, {3, 3}}, {9, {4, 2}}, {10, {4, 3}}};
  const ObjectSpec& o4 = instance.object(4);
  const ObjectSpec& o5 = instance.object(5);
  const double p5 = instance.p(5);
  const double p6 = instance.p(6);
  const double dc4 = o4.delta_cost();
  const double dc5 = o5.delta_cost();
  const double c7s = instance.c_suction(7);
  const bool holds = dc4 <= c7s && c7s <= dc5 && p6 * (dc5 - dc4) > p5 * dc4 && p5 * dc4 > p6 * (c7s - dc4);
  return {"suction_detour", std::move(instance), std::move(fixed), 7, {3, 1}, {3, 2}, holds};
}

// 5x3 shelf. Column 1 holds 9, 10, 11 front to back; object 12 goes into
// column 2 either one row deep at (2,2) or at the front (2,1).
inline MisselectionCase front_slot_case() {
  const double c_r = 10.0;
  std::vector<ObjectSpec> objects = {
      {1, 0, 2, 3},    {2, 0, 2, 3},   {3, 0, 10, 13},  {4, 4, 10, 13},  {5, 0, 10, 13},
      {6, 0, 10, 13},  {7, 0, 10, 13}, {8, 0, 10, 13},  {9, 0, 2, 3},    {10, 1, 2, 8},
      {11, 7, 10, 13}, {12, 0, 2, 3},  {13, 20, 10, 13},
  };
  ProblemInstance instance(ShelfGrid(5, 3), objects, c_r);
  std::vector<Placement> fixed = {{9, {1, 1}}, {10, {1, 2}}, {11, {1, 3}}, {3, {2, 3}}, {5, {3, 1}}, {6, {3, 2}},
                                  {7, {3, 3}}, {1, {4, 1}},  {2, {4, 2}},  {4, {4, 3}}, {13, {5, 2}}, {8, {5, 3}}};
  const double p4 = instance.p(4);
  const double p7 = instance.p(7);
  const double p10 = instance.p(10);
  const double p11 = instance.p(11);
  const double dc9 = instance.object(9).delta_cost();
  const double dc10 = instance.object(10).delta_cost();
  const double c12s = instance.c_suction(12);
  const double lhs = (p4 + p7) * std::min(c12s, c_r) + p10 * dc9;
  const double mid = p11 * std::min(dc10 - dc9, c12s - dc9);
  const double upper = p11 * (dc10 - dc9);
  const double rhs = (p4 + p7) * c_r + p10 * dc9;
  const bool holds = dc9 < c12s && c12s < c_r && dc9 < dc10 && lhs < mid && mid <= upper && upper < rhs;
  return {"front_slot", std::move(instance), std::move(fixed), 12, {2, 2}, {2, 1}, holds};
}

// Branch and bound (with the other objects pinned) selects the surrogate
// pick; true-cost enumeration strictly prefers the other cell.
inline SuiteResult misselection_suite(PlanAudit* audit = nullptr) {
  detail::SuiteTimer timer;
  SuiteResult r;
  r.name = "misselection_regressions";
  std::ostringstream art;
  art << "{\"cases\":[";
  bool first = true;
  for (const MisselectionCase& c : {suction_detour_case(), front_slot_case()}) {
    SolverConfig config;
    config.fixed = c.fixed;
    const SolveResult bnb = solve_osa_bnb(c.instance, config);
    const SolveResult truth = solve_bruteforce(c.instance, Objective::TrueCost, c.fixed);
    const Arrangement a = c.with_free_at(c.surrogate_pick);
    const Arrangement b = c.with_free_at(c.true_pick);
    const ExpectedCostResult ca = expected_cost(c.instance, a);
    const ExpectedCostResult cb = expected_cost(c.instance, b);
    if (audit != nullptr) {
      audit->check(ca.plans);
      audit->check(cb.plans);
    }
    const double sa = surrogate_objective(c.instance, a);
    const double sb = surrogate_objective(c.instance, b);
    const Cell bnb_cell = bnb.arrangement.cell_of(c.free_object);
    const Cell truth_cell = truth.arrangement.cell_of(c.free_object);
    ++r.cases;
    if (!first) art << ",";
    first = false;
    art << "{\"name\":\"" << c.name << "\",\"conditions_hold\":" << (c.conditions_hold ? "true" : "false")
        << ",\"bnb_cell\":\"" << to_string(bnb_cell) << "\",\"bnb_proved_optimal\":"
        << (bnb.proved_optimal ? "true" : "false") << ",\"truth_cell\":\"" << to_string(truth_cell)
        << "\",\"surrogate_a\":" << format_number(sa) << ",\"surrogate_b\":" << format_number(sb)
        << ",\"true_a\":" << format_number(ca.expected_cost) << ",\"true_b\":" << format_number(cb.expected_cost)
        << "}";
    const std::string where = c.name + ": ";
    if (!c.conditions_hold) {
      detail::fail(r, where + "cost parameters violate the misselection conditions");
    } else if (!(bnb_cell == c.surrogate_pick) || !bnb.proved_optimal) {
      detail::fail(r, where + "branch and bound chose " + to_string(bnb_cell));
    } else if (!(truth_cell == c.true_pick)) {
      detail::fail(r, where + "true-cost optimum at " + to_string(truth_cell));
    } else if (!(cb.expected_cost < ca.expected_cost) || !(sa < sb) || ca.any_fallback || cb.any_fallback) {
      detail::fail(r, where + "cost ordering does not reverse");
    }
  }
  art << "]}\n";
  r.artifact = art.str();
  r.seconds = timer.seconds();
  return r;
}

}  // namespace osa
