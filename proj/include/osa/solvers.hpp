#pragma once

// Arrangement producers: exhaustive oracle, branch-and-bound on the surrogate
// objective, and the random / priority-greedy baselines.

#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "osa/planner.hpp"
#include "osa/random.hpp"
#include "osa/shelf.hpp"
#include "osa/surrogate.hpp"

namespace osa {

enum class Objective { Surrogate, TrueCost };

inline const char* to_string(Objective o) { return o == Objective::Surrogate ? "surrogate" : "true_cost"; }

struct Placement {
  int id = 0;
  Cell cell;
};

struct SolverConfig {
  Objective objective = Objective::Surrogate;
  double time_budget_s = 500.0;
  double incumbent_patience_s = 90.0;
  // Deterministic cap on branch-and-bound nodes; 0 disables it.
  std::uint64_t node_limit = 0;
  bool no_removal_constraint = false;
  std::uint64_t rng_seed = 0;
  // Objects pinned to cells before the search starts.
  std::vector<Placement> fixed;
  // Planner settings used when objective == TrueCost.
  PlannerOptions planner;
};

struct SolveResult {
  Arrangement arrangement;
  double objective_value = 0.0;
  bool proved_optimal = false;
  std::uint64_t nodes = 0;
  std::chrono::duration<double> elapsed{0.0};
};

// Evaluates an arrangement under the chosen objective.
inline double objective_value(const ProblemInstance& instance, const Arrangement& arr, Objective objective,
                              const PlannerOptions& planner = {}) {
  if (objective == Objective::Surrogate) return surrogate_objective(instance, arr);
  return expected_cost(instance, arr, planner).expected_cost;
}

namespace detail {

// Occupancy with the pinned objects in place; validates the pins.
inline std::vector<int> pinned_occupancy(const ProblemInstance& instance, const std::vector<Placement>& fixed,
                                         std::vector<bool>& is_fixed) {
  const ShelfGrid& grid = instance.grid();
  std::vector<int> occ(grid.cell_count(), 0);
  is_fixed.assign(instance.n() + 1, false);
  for (const Placement& pl : fixed) {
    instance.object(pl.id);
    if (!grid.contains(pl.cell)) throw Error("pinned cell " + to_string(pl.cell) + " is outside the shelf");
    if (is_fixed[pl.id]) throw Error("object " + std::to_string(pl.id) + " is pinned twice");
    if (occ[grid.index(pl.cell)] != 0) throw Error("two objects pinned to " + to_string(pl.cell));
    is_fixed[pl.id] = true;
    occ[grid.index(pl.cell)] = pl.id;
  }
  return occ;
}

}  // namespace detail

namespace detail {

// Expected true cost of the occupancy, summed in ascending id order exactly
// like expected_cost(). Returns false as soon as the value provably reaches
// `bound`: first against the push-cost lower bound, then on partial sums.
inline bool true_cost_at_least(const ProblemInstance& instance, const std::vector<int>& occ, double bound,
                               const PlannerOptions& planner, double& value) {
  const ShelfGrid& grid = instance.grid();
  std::vector<Cell> where(instance.n());
  for (int k = 0; k < grid.cell_count(); ++k) {
    if (occ[k] != 0) where[occ[k] - 1] = grid.cell(k);
  }
  double lb = 0.0;
  for (int id = 1; id <= instance.n(); ++id) lb += instance.p(id) * front_push_sum(instance, occ, where[id - 1]);
  if (lb >= bound) return false;
  const ShelfState start{occ};
  value = 0.0;
  for (int id = 1; id <= instance.n(); ++id) {
    if (instance.p(id) == 0.0) continue;
    value += instance.p(id) * plan_retrieval(instance, start, id, planner).total_cost;
    if (value >= bound) return false;
  }
  return true;
}

}  // namespace detail

// Exhaustive search in lexicographic placement order; the first minimizer
// found (strict improvement only) is the lexicographically smallest one.
inline SolveResult solve_bruteforce(const ProblemInstance& instance, Objective objective,
                                    const std::vector<Placement>& fixed = {}, const PlannerOptions& planner = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const ShelfGrid& grid = instance.grid();
  const int n = instance.n();
  std::vector<bool> is_fixed;
  std::vector<int> occ = detail::pinned_occupancy(instance, fixed, is_fixed);

  std::vector<int> free_ids;
  for (int id = 1; id <= n; ++id) {
    if (!is_fixed[id]) free_ids.push_back(id);
  }
  const int free_cells = grid.cell_count() - static_cast<int>(fixed.size());
  double count = 1.0;
  for (int k = 0; k < static_cast<int>(free_ids.size()); ++k) count *= free_cells - k;
  if (count > 1e7) throw Error("instance too large for exhaustive enumeration");

  std::vector<Cell> cells(n);
  for (const Placement& pl : fixed) cells[pl.id - 1] = pl.cell;

  SolveResult result;
  double best = std::numeric_limits<double>::infinity();
  std::optional<Arrangement> best_arr;
  std::uint64_t leaves = 0;

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == free_ids.size()) {
      ++leaves;
      double value = 0.0;
      if (objective == Objective::Surrogate) {
        value = surrogate_objective(instance, std::span<const int>(occ));
      } else if (!detail::true_cost_at_least(instance, occ, best, planner, value)) {
        return;
      }
      if (value < best) {
        best = value;
        best_arr = Arrangement(cells);
      }
      return;
    }
    const int id = free_ids[depth];
    for (int k = 0; k < grid.cell_count(); ++k) {
      if (occ[k] != 0) continue;
      occ[k] = id;
      cells[id - 1] = grid.cell(k);
      self(self, depth + 1);
      occ[k] = 0;
    }
  };
  recurse(recurse, 0);

  result.arrangement = *best_arr;
  result.objective_value = best;
  result.proved_optimal = true;
  result.nodes = leaves;
  result.elapsed = clock::now() - t0;
  return result;
}

namespace detail {

// Branch-and-bound over partial assignments. Unassigned cells are cells
// that may still receive a free object.
class BranchAndBound {
 public:
  BranchAndBound(const ProblemInstance& instance, const SolverConfig& config)
      : instance_(instance), grid_(instance.grid()), config_(config) {
    occ_ = pinned_occupancy(instance, config.fixed, is_fixed_);
    for (int id = 1; id <= instance.n(); ++id) {
      if (!is_fixed_[id]) free_ids_.push_back(id);
    }
    std::stable_sort(free_ids_.begin(), free_ids_.end(),
                     [&](int a, int b) { return instance.p(a) > instance.p(b); });
    for (int j = 1; j <= grid_.m_y(); ++j) {
      for (int i = 1; i <= grid_.m_x(); ++i) cell_order_.push_back(grid_.index(i, j));
    }
    // Cells left empty in any completion; caps the front-empty count.
    empty_total_ = grid_.cell_count() - instance.n();
  }

  SolveResult run() {
    using clock = std::chrono::steady_clock;
    start_ = clock::now();
    last_improvement_ = start_;
    initial_incumbent();
    complete_ = true;
    search(0);
    SolveResult result;
    result.arrangement = Arrangement::from_occupancy(grid_, best_occ_, instance_.n());
    result.objective_value = evaluate(best_occ_);
    result.proved_optimal = complete_;
    result.nodes = nodes_;
    result.elapsed = clock::now() - start_;
    return result;
  }

 private:
  bool surrogate() const { return config_.objective == Objective::Surrogate; }

  double evaluate(const std::vector<int>& occ) const {
    if (surrogate()) return surrogate_objective(instance_, std::span<const int>(occ));
    return expected_cost(instance_, Arrangement::from_occupancy(grid_, occ, instance_.n()), config_.planner)
        .expected_cost;
  }

  bool feasible(const std::vector<int>& occ) const {
    if (!config_.no_removal_constraint) return true;
    const SurrogateReport report = evaluate_surrogate(instance_, std::span<const int>(occ));
    return report.total_removals() == 0;
  }

  bool occupied_or_wall(int i, int j) const { return i < 1 || i > grid_.m_x() || occ_[grid_.index(i, j)] != 0; }

  // Optimistic cost of an object standing at (i, j) given the current
  // partial assignment: unassigned cells in front are assumed empty, an
  // assigned obstacle costs a suction only when both side neighbors are
  // already occupied, and only obstacles that can certainly not be tucked
  // count toward removals.
  double cell_bound(int i, int j, const std::vector<int>& lead_free, int lead_total, int& removals) const {
    double y = 0.0;
    int stuck = 0;
    for (int jj = 1; jj < j; ++jj) {
      const int id = occ_[grid_.index(i, jj)];
      if (id == 0) continue;
      const ObjectSpec& o = instance_.objects()[id - 1];
      const bool boxed = occupied_or_wall(i - 1, jj) && occupied_or_wall(i + 1, jj);
      if (surrogate() && boxed) {
        y += o.c_suction;
        ++stuck;
      } else {
        y += o.c_push;
      }
    }
    removals = 0;
    if (!surrogate()) return y;
    const int other_front_empty = std::min(lead_total - lead_free[i - 1], empty_total_);
    removals = std::max(stuck - other_front_empty, 0);
    return y + instance_.c_removal() * removals;
  }

  // Returns false when the no-removal constraint is already violated.
  bool lower_bound(std::size_t depth, double& lb) const {
    std::vector<int> lead_free(grid_.m_x(), 0);
    int lead_total = 0;
    for (int i = 1; i <= grid_.m_x(); ++i) {
      for (int j = 1; j <= grid_.m_y() && occ_[grid_.index(i, j)] == 0; ++j) ++lead_free[i - 1];
      lead_total += lead_free[i - 1];
    }
    lb = 0.0;
    int removals = 0;
    for (int k = 0; k < grid_.cell_count(); ++k) {
      const int id = occ_[k];
      if (id == 0) continue;
      const Cell c = grid_.cell(k);
      const double cost = cell_bound(c.i, c.j, lead_free, lead_total, removals);
      if (config_.no_removal_constraint && removals > 0) return false;
      lb += instance_.objects()[id - 1].p * cost;
    }
    const std::size_t remaining = free_ids_.size() - depth;
    if (remaining == 0) return true;
    thread_local std::vector<double> w;
    w.clear();
    for (int k = 0; k < grid_.cell_count(); ++k) {
      if (occ_[k] != 0) continue;
      const Cell c = grid_.cell(k);
      w.push_back(cell_bound(c.i, c.j, lead_free, lead_total, removals));
    }
    std::sort(w.begin(), w.end());
    // free_ids_ is sorted by descending p, so the tail is matched with the
    // cheapest cells.
    for (std::size_t r = 0; r < remaining; ++r) lb += instance_.objects()[free_ids_[depth + r] - 1].p * w[r];
    return true;
  }

  bool out_of_budget() {
    if (config_.node_limit != 0 && nodes_ >= config_.node_limit) return true;
    if ((nodes_ & 0x3ff) == 0) {
      const auto now = std::chrono::steady_clock::now();
      const double total = std::chrono::duration<double>(now - start_).count();
      const double idle = std::chrono::duration<double>(now - last_improvement_).count();
      if (total > config_.time_budget_s || idle > config_.incumbent_patience_s) stopped_ = true;
    }
    return stopped_;
  }

  static bool improves(double lb, double incumbent) { return lb * (1.0 - 1e-12) - 1e-12 < incumbent; }

  void search(std::size_t depth) {
    if (depth == free_ids_.size()) {
      if (!feasible(occ_)) return;
      const double value = evaluate(occ_);
      if (value < best_) {
        best_ = value;
        best_occ_ = occ_;
        last_improvement_ = std::chrono::steady_clock::now();
      }
      return;
    }
    const int id = free_ids_[depth];
    for (int k : cell_order_) {
      if (occ_[k] != 0) continue;
      if (out_of_budget()) {
        complete_ = false;
        return;
      }
      ++nodes_;
      occ_[k] = id;
      double lb = 0.0;
      if (lower_bound(depth + 1, lb) && improves(lb, best_)) search(depth + 1);
      occ_[k] = 0;
      if (stopped_ || (config_.node_limit != 0 && nodes_ >= config_.node_limit)) {
        complete_ = false;
        return;
      }
    }
  }

  // Seeds the incumbent with the best of a few constructive placements,
  // each improved by first-improvement move/swap local search.
  void initial_incumbent() {
    std::vector<int> free_cells;
    for (int k : cell_order_) {
      if (occ_[k] == 0) free_cells.push_back(k);
    }
    std::vector<std::vector<int>> starts;
    {
      // Front first, by descending probability.
      std::vector<int> occ = occ_;
      for (std::size_t r = 0; r < free_ids_.size(); ++r) occ[free_cells[r]] = free_ids_[r];
      starts.push_back(occ);
      // Same objects per column, packed against the back wall.
      std::vector<int> packed(occ.size(), 0);
      bool pinned_moved = false;
      for (int i = 1; i <= grid_.m_x(); ++i) {
        int slot = grid_.m_y();
        for (int j = grid_.m_y(); j >= 1; --j) {
          const int id = occ[grid_.index(i, j)];
          if (id == 0) continue;
          if (is_fixed_[id] && slot != j) pinned_moved = true;
          packed[grid_.index(i, slot--)] = id;
        }
      }
      if (!pinned_moved) starts.push_back(packed);
    }
    if (config_.fixed.empty()) {
      const RemovalFreeResult witness = removal_free_arrangement(instance_);
      if (witness.exists) {
        std::vector<Cell> cells = witness.witness->cells();
        std::vector<int> occ(grid_.cell_count(), 0);
        for (std::size_t r = 0; r < free_ids_.size(); ++r) occ[grid_.index(cells[r])] = free_ids_[r];
        starts.push_back(occ);
      }
    }

    best_ = std::numeric_limits<double>::infinity();
    for (std::vector<int>& occ : starts) {
      local_search(occ);
      if (!feasible(occ)) continue;
      const double value = evaluate(occ);
      if (value < best_) {
        best_ = value;
        best_occ_ = occ;
      }
    }
    if (best_occ_.empty()) {
      // Only reachable under the no-removal constraint; the search will
      // find a feasible leaf because the shelf is not dense.
      best_occ_ = starts.front();
    }
  }

  void local_search(std::vector<int>& occ) const {
    if (!surrogate()) return;
    double current = surrogate_objective(instance_, std::span<const int>(occ));
    const int cells = grid_.cell_count();
    for (int round = 0; round < 1000; ++round) {
      bool improved = false;
      for (int a = 0; a < cells && !improved; ++a) {
        if (occ[a] == 0 || is_fixed_[occ[a]]) continue;
        for (int b = 0; b < cells; ++b) {
          if (b == a || (occ[b] != 0 && is_fixed_[occ[b]])) continue;
          std::swap(occ[a], occ[b]);
          const double value = surrogate_objective(instance_, std::span<const int>(occ));
          if (value < current) {
            current = value;
            improved = true;
            break;
          }
          std::swap(occ[a], occ[b]);
        }
      }
      if (!improved) break;
    }
  }

  const ProblemInstance& instance_;
  const ShelfGrid& grid_;
  const SolverConfig& config_;
  std::vector<int> occ_;
  std::vector<bool> is_fixed_;
  std::vector<int> free_ids_;
  std::vector<int> cell_order_;
  int empty_total_ = 0;
  double best_ = 0.0;
  std::vector<int> best_occ_;
  std::uint64_t nodes_ = 0;
  bool complete_ = true;
  bool stopped_ = false;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_improvement_;
};

}  // namespace detail

inline SolveResult solve_osa_bnb(const ProblemInstance& instance, const SolverConfig& config = {}) {
  if (!(config.time_budget_s > 0.0) || !(config.incumbent_patience_s > 0.0)) {
    throw Error("solver budgets must be positive");
  }
  if (config.no_removal_constraint && is_dense(instance)) {
    throw Error("no-removal constraint is infeasible on a dense shelf");
  }
  detail::BranchAndBound bnb(instance, config);
  return bnb.run();
}

// Uniform injective placement: n cells drawn without replacement from the
// lexicographic cell list, assigned to objects in id order.
inline Arrangement arrange_random(const ProblemInstance& instance, std::uint64_t seed) {
  const ShelfGrid& grid = instance.grid();
  std::vector<Cell> all;
  for (int k = 0; k < grid.cell_count(); ++k) all.push_back(grid.cell(k));
  Xoshiro256StarStar rng(seed);
  return Arrangement(sample_without_replacement(std::move(all), instance.n(), rng));
}

// Same cell sample as arrange_random, sorted front to back (then left to
// right) and filled in descending probability order.
inline Arrangement arrange_priority_greedy(const ProblemInstance& instance, std::uint64_t seed) {
  std::vector<Cell> cells = arrange_random(instance, seed).cells();
  std::sort(cells.begin(), cells.end(), [](Cell a, Cell b) { return a.j != b.j ? a.j < b.j : a.i < b.i; });
  std::vector<int> order(instance.n());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return instance.p(a) > instance.p(b); });
  std::vector<Cell> placement(instance.n());
  for (int r = 0; r < instance.n(); ++r) placement[order[r] - 1] = cells[r];
  return Arrangement(std::move(placement));
}

}  // namespace osa
