#pragma once

// Non-preemptive surrogate cost of a fixed arrangement.
//
// Materializes every quantity of the linearized arrangement program for a
// known placement: occupancy a, prefix counts e, clear-front flags f, leading
// empty counts d, pushability delta, per-object push/suction flags, tuck
// flags, relocation costs y and removal counts b. The expected cost is the
// program objective sum_l p_l (y_l + c_r b_l).
//
// Cells beyond the side walls behave as permanently occupied with something
// in front of them (a = 1, f = 0).

#include <span>
#include <vector>

#include "osa/shelf.hpp"

namespace osa {

struct SurrogateBreakdown {
  ShelfGrid grid{1, 1};
  int n = 0;
  // Per cell, indexed by ShelfGrid::index.
  std::vector<int> a;
  std::vector<int> e;
  std::vector<int> f;
  std::vector<int> delta;
  std::vector<int> tucked;
  // Per column, index i - 1.
  std::vector<int> d;
  // Per (object, cell), indexed by entry().
  std::vector<int> delta_push;
  std::vector<int> delta_suction;
  std::vector<double> y;
  std::vector<int> b;

  int cell(int i, int j) const { return grid.index(i, j); }
  std::size_t entry(int id, int i, int j) const {
    return static_cast<std::size_t>(id - 1) * grid.cell_count() + grid.index(i, j);
  }
};

struct SurrogateReport {
  std::vector<double> per_object_cost;   // index id - 1
  std::vector<int> per_object_removals;  // index id - 1
  double expected_cost = 0.0;
  SurrogateBreakdown breakdown;

  int total_removals() const {
    int total = 0;
    for (int r : per_object_removals) total += r;
    return total;
  }
};

struct RetrievalEstimate {
  double cost = 0.0;
  int removals = 0;
};

namespace detail {

// Shared by every surrogate entry point so that all of them produce
// bit-identical costs. Objects absent from `occ` get zero cost.
inline double surrogate_core(const ProblemInstance& instance, std::span<const int> occ,
                             std::vector<double>& cost, std::vector<int>& removals,
                             SurrogateBreakdown* out) {
  const ShelfGrid& grid = instance.grid();
  const int m_x = grid.m_x();
  const int m_y = grid.m_y();
  const int cells = grid.cell_count();
  const int n = instance.n();
  if (static_cast<int>(occ.size()) != cells) throw Error("occupancy size does not match the shelf");

  thread_local std::vector<int> a, e, f, delta, tucked, d;
  a.assign(cells, 0);
  e.assign(cells, 0);
  f.assign(cells, 0);
  delta.assign(cells, 0);
  tucked.assign(cells, 0);
  d.assign(m_x, 0);

  for (int i = 1; i <= m_x; ++i) {
    int count = 0;
    for (int j = 1; j <= m_y; ++j) {
      const int k = grid.index(i, j);
      a[k] = occ[k] != 0 ? 1 : 0;
      count += a[k];
      e[k] = count;
      f[k] = count == 0 ? 1 : 0;
      d[i - 1] += f[k];
    }
  }
  int total_front_empty = 0;
  for (int v : d) total_front_empty += v;

  auto occupied = [&](int i, int j) { return i < 1 || i > m_x ? 1 : a[grid.index(i, j)]; };
  auto blocked_or_clear = [&](int i, int j) {
    if (i < 1 || i > m_x) return true;
    const int k = grid.index(i, j);
    return a[k] == 1 || f[k] == 1;
  };
  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      const int k = grid.index(i, j);
      delta[k] = (occupied(i - 1, j) && occupied(i + 1, j)) ? 0 : 1;
      tucked[k] = (a[k] == 1 && !(blocked_or_clear(i - 1, j) && blocked_or_clear(i + 1, j))) ? 1 : 0;
    }
  }

  if (out != nullptr) {
    out->grid = grid;
    out->n = n;
  }
  cost.assign(n, 0.0);
  removals.assign(n, 0);
  for (int k = 0; k < cells; ++k) {
    const int id = occ[k];
    if (id == 0) continue;
    if (id < 1 || id > n) throw Error("occupancy references an unknown object");
    const Cell c = grid.cell(k);
    double y = 0.0;
    int tucks = 0;
    for (int jj = 1; jj < c.j; ++jj) {
      const int kk = grid.index(c.i, jj);
      const int obstacle = occ[kk];
      if (obstacle == 0) continue;
      const ObjectSpec& o = instance.objects()[obstacle - 1];
      y += delta[kk] ? o.c_push : o.c_suction;
      tucks += tucked[kk];
    }
    const int other_front_empty = total_front_empty - d[c.i - 1];
    const int b = std::max(e[k] - 1 - tucks - other_front_empty, 0);
    cost[id - 1] = y + instance.c_removal() * b;
    removals[id - 1] = b;
    if (out != nullptr) {
      out->y[out->entry(id, c.i, c.j)] = y;
      out->b[out->entry(id, c.i, c.j)] = b;
    }
  }

  if (out != nullptr) {
    out->a = a;
    out->e = e;
    out->f = f;
    out->delta = delta;
    out->tucked = tucked;
    out->d = d;
    out->delta_push.assign(static_cast<std::size_t>(n) * cells, 0);
    out->delta_suction.assign(static_cast<std::size_t>(n) * cells, 0);
    for (int k = 0; k < cells; ++k) {
      const int id = occ[k];
      if (id == 0) continue;
      const std::size_t slot = static_cast<std::size_t>(id - 1) * cells + k;
      out->delta_push[slot] = delta[k];
      out->delta_suction[slot] = 1 - delta[k];
    }
  }

  double expected = 0.0;
  for (int id = 1; id <= n; ++id) expected += instance.objects()[id - 1].p * cost[id - 1];
  return expected;
}

}  // namespace detail

// Surrogate report for an arbitrary shelf occupancy (objects may be absent).
inline SurrogateReport evaluate_surrogate(const ProblemInstance& instance, std::span<const int> occ) {
  SurrogateReport report;
  const std::size_t entries = static_cast<std::size_t>(instance.n()) * instance.grid().cell_count();
  report.breakdown.y.assign(entries, 0.0);
  report.breakdown.b.assign(entries, 0);
  report.expected_cost = detail::surrogate_core(instance, occ, report.per_object_cost,
                                                report.per_object_removals, &report.breakdown);
  return report;
}

inline SurrogateReport evaluate_surrogate(const ProblemInstance& instance, const Arrangement& arr) {
  arr.check(instance);
  const std::vector<int> occ = arr.occupancy(instance.grid());
  return evaluate_surrogate(instance, std::span<const int>(occ));
}

// Expected surrogate cost only; identical to evaluate_surrogate().expected_cost.
inline double surrogate_objective(const ProblemInstance& instance, std::span<const int> occ) {
  thread_local std::vector<double> cost;
  thread_local std::vector<int> removals;
  return detail::surrogate_core(instance, occ, cost, removals, nullptr);
}

inline double surrogate_objective(const ProblemInstance& instance, const Arrangement& arr) {
  arr.check(instance);
  const std::vector<int> occ = arr.occupancy(instance.grid());
  return surrogate_objective(instance, std::span<const int>(occ));
}

inline RetrievalEstimate surrogate_retrieval_cost(const ProblemInstance& instance,
                                                  std::span<const int> occ, int target) {
  instance.object(target);
  if (std::find(occ.begin(), occ.end(), target) == occ.end()) {
    throw Error("target object " + std::to_string(target) + " is not on the shelf");
  }
  std::vector<double> cost;
  std::vector<int> removals;
  detail::surrogate_core(instance, occ, cost, removals, nullptr);
  return {cost[target - 1], removals[target - 1]};
}

inline RetrievalEstimate surrogate_retrieval_cost(const ProblemInstance& instance, const Arrangement& arr,
                                                  int target) {
  arr.check(instance);
  const std::vector<int> occ = arr.occupancy(instance.grid());
  return surrogate_retrieval_cost(instance, std::span<const int>(occ), target);
}

// True when no object needs a removal under the surrogate accounting.
inline bool removal_free(const SurrogateReport& report) { return report.total_removals() == 0; }

}  // namespace osa
