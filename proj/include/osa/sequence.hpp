#pragma once

// Sequential retrieval: targets are drawn one after another from the
// retrieval distribution restricted to the objects still on the shelf, each
// retrieval is executed, and the shelf state carries over to the next draw.

#include <cstdint>
#include <vector>

#include "osa/planner.hpp"
#include "osa/random.hpp"
#include "osa/shelf.hpp"

namespace osa {

struct EpisodeStep {
  int target = 0;
  RetrievalPlan plan;
  // Actions actually applied to the shelf. Equal to plan.actions for exact
  // plans; for fallback plans, the non-preemptive clearing sequence.
  std::vector<Action> executed;
  ShelfState post_state;
  double cost = 0.0;
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::vector<EpisodeStep> steps;
  std::vector<double> cumulative_cost;

  double total_cost() const { return cumulative_cost.empty() ? 0.0 : cumulative_cost.back(); }
};

// Inverse-CDF draw over the listed ids in ascending order. When every listed
// object has zero probability the draw is uniform over them.
inline int sample_target(const ProblemInstance& instance, const std::vector<int>& ids, Xoshiro256StarStar& rng) {
  if (ids.empty()) throw Error("no object left to sample");
  double total = 0.0;
  for (int id : ids) total += instance.p(id);
  if (!(total > 0.0)) return ids[static_cast<std::size_t>(rng.uniform_below(ids.size()))];
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  int last_positive = ids.front();
  for (int id : ids) {
    const double p = instance.p(id);
    if (p <= 0.0) continue;
    last_positive = id;
    acc += p;
    if (u < acc) return id;
  }
  return last_positive;
}

// Clears the target column without preemptive moves: the frontmost obstacle
// is pushed left, else right, else sucked to the first clear-front empty cell
// outside the target column, else removed.
inline std::vector<Action> nonpreemptive_clearing(const ProblemInstance& instance, ShelfState& state, int target) {
  const ShelfGrid& grid = instance.grid();
  std::vector<Action> done;
  while (!target_clear(state, grid, target)) {
    const Cell t = grid.cell(state.find(target));
    const std::vector<Action> legal = legal_actions(state, instance, target);
    const Action* pick = nullptr;
    for (int dir : {-1, +1}) {
      for (const Action& a : legal) {
        if (pick == nullptr && a.from.i == t.i && a.kind == ActionKind::Push && a.direction == dir) pick = &a;
      }
    }
    if (pick == nullptr) {
      for (const Action& a : legal) {
        if (a.from.i == t.i && a.kind == ActionKind::Suction && a.to.i != t.i) {
          pick = &a;
          break;
        }
      }
    }
    if (pick == nullptr) {
      for (const Action& a : legal) {
        if (a.from.i == t.i && a.kind == ActionKind::Remove) pick = &a;
      }
    }
    const Action chosen = *pick;
    apply_action(instance, state, chosen, target);
    done.push_back(chosen);
  }
  return done;
}

inline EpisodeTrace run_episode(const ProblemInstance& instance, const Arrangement& arr, std::uint64_t seed,
                                const PlannerOptions& options = {}) {
  arr.check(instance);
  const ShelfGrid& grid = instance.grid();
  EpisodeTrace trace;
  trace.seed = seed;
  Xoshiro256StarStar rng(seed);
  ShelfState state = ShelfState::from(arr, grid);
  double running = 0.0;
  for (;;) {
    std::vector<int> ids;
    for (int id : state.occupancy) {
      if (id != 0) ids.push_back(id);
    }
    if (ids.empty()) break;
    std::sort(ids.begin(), ids.end());
    EpisodeStep step;
    step.target = sample_target(instance, ids, rng);
    step.plan = plan_retrieval(instance, state, step.target, options);
    if (step.plan.method == PlanMethod::Exact) {
      for (const Action& a : step.plan.actions) apply_action(instance, state, a, step.target);
      step.executed = step.plan.actions;
    } else {
      step.executed = nonpreemptive_clearing(instance, state, step.target);
    }
    state.occupancy[state.find(step.target)] = 0;
    step.cost = step.plan.total_cost;
    step.post_state = state;
    running += step.cost;
    trace.cumulative_cost.push_back(running);
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

// Mean cumulative cost after k retrievals, averaged over the traces that
// performed at least k retrievals.
inline std::vector<double> cumulative_cost_curve(const std::vector<EpisodeTrace>& traces) {
  if (traces.empty()) throw Error("no traces to average");
  std::size_t longest = 0;
  for (const EpisodeTrace& t : traces) longest = std::max(longest, t.cumulative_cost.size());
  std::vector<double> curve(longest, 0.0);
  for (std::size_t k = 0; k < longest; ++k) {
    double sum = 0.0;
    int count = 0;
    for (const EpisodeTrace& t : traces) {
      if (k < t.cumulative_cost.size()) {
        sum += t.cumulative_cost[k];
        ++count;
      }
    }
    curve[k] = sum / count;
  }
  return curve;
}

}  // namespace osa
