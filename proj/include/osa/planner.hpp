#pragma once

// Optimal retrieval of a single target with preemptive actions.
//
// A* over shelf occupancies. Only the frontmost object of each column may be
// moved, and never the target. Push moves one cell sideways into an empty
// cell, suction places the object on any empty cell with a clear front
// (behind its own origin included), and removal takes it off the shelf for
// c_suction + c_removal. The heuristic is the push cost of every obstacle
// still in front of the target, which is consistent because each of them has
// to be moved at least once and no action costs less than a push.

#include <chrono>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "osa/shelf.hpp"
#include "osa/surrogate.hpp"

namespace osa {

// Cell-indexed occupancy (0 = empty). Objects of the instance that do not
// appear are off the shelf, either removed or already retrieved.
struct ShelfState {
  std::vector<int> occupancy;

  static ShelfState from(const Arrangement& arr, const ShelfGrid& grid) { return {arr.occupancy(grid)}; }

  bool contains(int id) const {
    return std::find(occupancy.begin(), occupancy.end(), id) != occupancy.end();
  }
  int find(int id) const {
    const auto it = std::find(occupancy.begin(), occupancy.end(), id);
    return it == occupancy.end() ? -1 : static_cast<int>(it - occupancy.begin());
  }
  // Ids in 1..n that are not on the shelf, ascending.
  std::vector<int> absent(int n) const {
    std::vector<bool> present(n + 1, false);
    for (int id : occupancy) {
      if (id > 0 && id <= n) present[id] = true;
    }
    std::vector<int> out;
    for (int id = 1; id <= n; ++id) {
      if (!present[id]) out.push_back(id);
    }
    return out;
  }
  friend bool operator==(const ShelfState&, const ShelfState&) = default;
};

enum class ActionKind { Push, Suction, Remove };

inline const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Push:
      return "push";
    case ActionKind::Suction:
      return "suction";
    case ActionKind::Remove:
      return "remove";
  }
  return "?";
}

struct Action {
  ActionKind kind = ActionKind::Push;
  int object = 0;
  Cell from;
  Cell to;         // destination for push and suction; {0, 0} for removal
  int direction = 0;  // -1 or +1 for pushes
  double cost = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

enum class PlanMethod { Exact, FallbackSurrogate };

inline const char* to_string(PlanMethod m) { return m == PlanMethod::Exact ? "exact" : "fallback_surrogate"; }

struct RetrievalPlan {
  int target = 0;
  std::vector<Action> actions;
  double total_cost = 0.0;
  PlanMethod method = PlanMethod::Exact;
  std::uint64_t nodes_expanded = 0;
  std::chrono::duration<double> elapsed{0.0};
  double root_heuristic = 0.0;
  double surrogate_cost = 0.0;
  int surrogate_removals = 0;

  // Objects taken off the shelf by the plan, in action order.
  std::vector<int> removed() const {
    std::vector<int> out;
    for (const Action& a : actions) {
      if (a.kind == ActionKind::Remove) out.push_back(a.object);
    }
    return out;
  }
};

struct PlannerOptions {
  double time_budget_s = 60.0;
  // Deterministic cap on node expansions; 0 disables it.
  std::uint64_t max_expansions = 0;
};

namespace detail {

inline bool front_clear(const ShelfGrid& grid, std::span<const int> occ, int i, int j) {
  for (int jj = 1; jj < j; ++jj) {
    if (occ[grid.index(i, jj)] != 0) return false;
  }
  return true;
}

inline double front_push_sum(const ProblemInstance& instance, std::span<const int> occ, Cell target) {
  const ShelfGrid& grid = instance.grid();
  double h = 0.0;
  for (int j = 1; j < target.j; ++j) {
    const int id = occ[grid.index(target.i, j)];
    if (id != 0) h += instance.objects()[id - 1].c_push;
  }
  return h;
}

}  // namespace detail

// Legal moves in the fixed order: by object id, then push -1, push +1,
// suctions by destination (i', j'), removal. `target` (0 for none) is never moved.
inline std::vector<Action> legal_actions(const ShelfState& state, const ProblemInstance& instance, int target) {
  const ShelfGrid& grid = instance.grid();
  const std::vector<int>& occ = state.occupancy;
  if (static_cast<int>(occ.size()) != grid.cell_count()) throw Error("state does not match the shelf");

  struct Mover {
    int id;
    Cell at;
  };
  std::vector<Mover> movers;
  for (int i = 1; i <= grid.m_x(); ++i) {
    for (int j = 1; j <= grid.m_y(); ++j) {
      const int id = occ[grid.index(i, j)];
      if (id == 0) continue;
      if (id != target) movers.push_back({id, {i, j}});
      break;
    }
  }
  std::sort(movers.begin(), movers.end(), [](const Mover& a, const Mover& b) { return a.id < b.id; });

  std::vector<Action> out;
  std::vector<int> scratch = occ;
  for (const Mover& m : movers) {
    const ObjectSpec& o = instance.object(m.id);
    for (int dir : {-1, +1}) {
      const Cell to{m.at.i + dir, m.at.j};
      if (grid.contains(to) && occ[grid.index(to)] == 0) {
        out.push_back({ActionKind::Push, m.id, m.at, to, dir, o.c_push});
      }
    }
    scratch[grid.index(m.at)] = 0;
    for (int i = 1; i <= grid.m_x(); ++i) {
      for (int j = 1; j <= grid.m_y(); ++j) {
        if (Cell{i, j} == m.at || scratch[grid.index(i, j)] != 0) continue;
        if (!detail::front_clear(grid, scratch, i, j)) continue;
        out.push_back({ActionKind::Suction, m.id, m.at, {i, j}, 0, o.c_suction});
      }
    }
    scratch[grid.index(m.at)] = m.id;
    out.push_back({ActionKind::Remove, m.id, m.at, {0, 0}, 0, o.c_suction + instance.c_removal()});
  }
  return out;
}

// Applies an action after checking it against the transition rules.
inline void apply_action(const ProblemInstance& instance, ShelfState& state, const Action& action, int target = 0) {
  const std::vector<Action> legal = legal_actions(state, instance, target);
  if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
    throw Error(std::string("illegal ") + to_string(action.kind) + " of object " + std::to_string(action.object));
  }
  const ShelfGrid& grid = instance.grid();
  state.occupancy[grid.index(action.from)] = 0;
  if (action.kind != ActionKind::Remove) state.occupancy[grid.index(action.to)] = action.object;
}

inline bool target_clear(const ShelfState& state, const ShelfGrid& grid, int target) {
  const int k = state.find(target);
  if (k < 0) throw Error("target object " + std::to_string(target) + " is not on the shelf");
  const Cell c = grid.cell(k);
  return detail::front_clear(grid, state.occupancy, c.i, c.j);
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string state_key(std::span<const int> occ) {
  std::string key(occ.size() * 2, '\0');
  for (std::size_t k = 0; k < occ.size(); ++k) {
    key[2 * k] = static_cast<char>(occ[k] & 0xff);
    key[2 * k + 1] = static_cast<char>((occ[k] >> 8) & 0xff);
  }
  return key;
}

inline std::vector<int> key_state(const std::string& key) {
  std::vector<int> occ(key.size() / 2);
  for (std::size_t k = 0; k < occ.size(); ++k) {
    occ[k] = static_cast<unsigned char>(key[2 * k]) | (static_cast<unsigned char>(key[2 * k + 1]) << 8);
  }
  return occ;
}

}  // namespace detail

inline RetrievalPlan plan_retrieval(const ProblemInstance& instance, const ShelfState& start, int target,
                                    const PlannerOptions& options = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  instance.object(target);
  if (!(options.time_budget_s > 0.0)) throw Error("planner budget must be positive");
  const ShelfGrid& grid = instance.grid();
  const int target_index = start.find(target);
  if (target_index < 0) throw Error("target object " + std::to_string(target) + " is not on the shelf");
  const Cell target_cell = grid.cell(target_index);

  RetrievalPlan plan;
  plan.target = target;
  const RetrievalEstimate estimate = surrogate_retrieval_cost(instance, start.occupancy, target);
  plan.surrogate_cost = estimate.cost;
  plan.surrogate_removals = estimate.removals;
  plan.root_heuristic = detail::front_push_sum(instance, start.occupancy, target_cell);

  struct Node {
    std::string key;
    double g;
    double h;
    std::uint64_t hash;
    std::int64_t parent;
    Action action;
  };
  std::vector<Node> nodes;
  struct Entry {
    double f;
    double g;
    std::uint64_t hash;
    std::int64_t node;
  };
  auto worse = [&nodes](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    if (a.hash != b.hash) return a.hash > b.hash;
    return nodes[a.node].key > nodes[b.node].key;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::unordered_map<std::string, double> best_g;
  std::unordered_map<std::string, bool> closed;

  {
    std::string key = detail::state_key(start.occupancy);
    const std::uint64_t hash = detail::fnv1a(key);
    best_g.emplace(key, 0.0);
    nodes.push_back({std::move(key), 0.0, plan.root_heuristic, hash, -1, Action{}});
    open.push({plan.root_heuristic, 0.0, hash, 0});
  }

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Node& node = nodes[top.node];
    if (top.g > best_g[node.key]) continue;
    if (closed.count(node.key) != 0) continue;
    closed.emplace(node.key, true);

    ShelfState state{detail::key_state(node.key)};
    if (detail::front_clear(grid, state.occupancy, target_cell.i, target_cell.j)) {
      std::vector<Action> actions;
      for (std::int64_t at = top.node; nodes[at].parent >= 0; at = nodes[at].parent) {
        actions.push_back(nodes[at].action);
      }
      std::reverse(actions.begin(), actions.end());
      plan.actions = std::move(actions);
      plan.total_cost = 0.0;
      for (const Action& a : plan.actions) plan.total_cost += a.cost;
      plan.method = PlanMethod::Exact;
      plan.elapsed = clock::now() - t0;
      return plan;
    }

    ++plan.nodes_expanded;
    if (options.max_expansions != 0 && plan.nodes_expanded > options.max_expansions) {
      break;
    }
    if ((plan.nodes_expanded & 0xff) == 0 &&
        std::chrono::duration<double>(clock::now() - t0).count() > options.time_budget_s) {
      break;
    }

    const double g = top.g;
    const std::int64_t parent = top.node;
    for (const Action& a : legal_actions(state, instance, target)) {
      std::vector<int>& occ = state.occupancy;
      occ[grid.index(a.from)] = 0;
      if (a.kind != ActionKind::Remove) occ[grid.index(a.to)] = a.object;
      std::string key = detail::state_key(occ);
      if (a.kind != ActionKind::Remove) occ[grid.index(a.to)] = 0;
      occ[grid.index(a.from)] = a.object;

      const double g2 = g + a.cost;
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= g2) continue;
      if (closed.count(key) != 0) continue;
      const std::vector<int> child = detail::key_state(key);
      const double h = detail::front_push_sum(instance, child, target_cell);
      const std::uint64_t hash = detail::fnv1a(key);
      best_g[key] = g2;
      nodes.push_back({std::move(key), g2, h, hash, parent, a});
      open.push({g2 + h, g2, hash, static_cast<std::int64_t>(nodes.size()) - 1});
    }
  }

  // Removal always makes progress, so the loop only ends here on budget.
  plan.actions.clear();
  plan.total_cost = estimate.cost;
  plan.method = PlanMethod::FallbackSurrogate;
  plan.elapsed = clock::now() - t0;
  return plan;
}

inline RetrievalPlan plan_retrieval(const ProblemInstance& instance, const Arrangement& arr, int target,
                                    const PlannerOptions& options = {}) {
  arr.check(instance);
  return plan_retrieval(instance, ShelfState::from(arr, instance.grid()), target, options);
}

struct ExpectedCostResult {
  double expected_cost = 0.0;
  std::vector<double> per_object;  // index id - 1
  bool any_fallback = false;
  std::vector<RetrievalPlan> plans;  // index id - 1
};

// C(S): every object is planned independently from the same arrangement and
// the weighted sum is taken in ascending id order.
inline ExpectedCostResult expected_cost(const ProblemInstance& instance, const Arrangement& arr,
                                        const PlannerOptions& options = {}) {
  arr.check(instance);
  const ShelfState start = ShelfState::from(arr, instance.grid());
  ExpectedCostResult result;
  for (int id = 1; id <= instance.n(); ++id) {
    RetrievalPlan plan = plan_retrieval(instance, start, id, options);
    result.per_object.push_back(plan.total_cost);
    result.any_fallback = result.any_fallback || plan.method != PlanMethod::Exact;
    result.plans.push_back(std::move(plan));
  }
  for (int id = 1; id <= instance.n(); ++id) {
    result.expected_cost += instance.objects()[id - 1].p * result.per_object[id - 1];
  }
  return result;
}

}  // namespace osa
