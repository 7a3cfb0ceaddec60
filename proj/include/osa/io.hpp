#pragma once

// JSON forms of instances, arrangements, reports, plans and episode traces.
// Requires nlohmann/json on the include path.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "osa/planner.hpp"
#include "osa/sequence.hpp"
#include "osa/shelf.hpp"
#include "osa/surrogate.hpp"

namespace osa {

using Json = nlohmann::ordered_json;

inline constexpr int kTraceSchemaVersion = 1;

namespace detail {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace detail

inline Json to_json(const ProblemInstance& instance) {
  Json objects = Json::array();
  for (const ObjectSpec& o : instance.objects()) {
    objects.push_back({{"id", o.id}, {"p", o.p}, {"c_push", o.c_push}, {"c_suction", o.c_suction}});
  }
  return {{"m_x", instance.grid().m_x()},
          {"m_y", instance.grid().m_y()},
          {"c_removal", instance.c_removal()},
          {"objects", objects}};
}

inline ProblemInstance instance_from_json(const Json& j) {
  const ShelfGrid grid(detail::required<int>(j, "m_x"), detail::required<int>(j, "m_y"));
  const Json objects = detail::required<Json>(j, "objects");
  if (!objects.is_array()) throw Error("\"objects\" must be an array");
  std::vector<ObjectSpec> specs;
  for (const Json& o : objects) {
    specs.push_back({detail::required<int>(o, "id"), detail::required<double>(o, "p"),
                     detail::required<double>(o, "c_push"), detail::required<double>(o, "c_suction")});
  }
  return ProblemInstance(grid, std::move(specs), detail::required<double>(j, "c_removal"));
}

inline Json to_json(const Arrangement& arr) {
  Json placement = Json::array();
  for (int id = 1; id <= arr.size(); ++id) {
    const Cell c = arr.cell_of(id);
    placement.push_back({{"id", id}, {"i", c.i}, {"j", c.j}});
  }
  return {{"placement", placement}};
}

inline Arrangement arrangement_from_json(const Json& j) {
  const Json placement = detail::required<Json>(j, "placement");
  if (!placement.is_array()) throw Error("\"placement\" must be an array");
  std::vector<Cell> cells(placement.size());
  std::vector<bool> seen(placement.size(), false);
  for (const Json& p : placement) {
    const int id = detail::required<int>(p, "id");
    if (id < 1 || id > static_cast<int>(cells.size()) || seen[id - 1]) {
      throw Error("placement ids must be unique and contiguous from 1");
    }
    seen[id - 1] = true;
    cells[id - 1] = {detail::required<int>(p, "i"), detail::required<int>(p, "j")};
  }
  return Arrangement(std::move(cells));
}

inline Json to_json(const Action& a) {
  Json j = {{"kind", to_string(a.kind)}, {"object", a.object}, {"from", {a.from.i, a.from.j}}};
  if (a.kind != ActionKind::Remove) j["to"] = {a.to.i, a.to.j};
  if (a.kind == ActionKind::Push) j["direction"] = a.direction;
  j["cost"] = a.cost;
  return j;
}

inline Json actions_to_json(const std::vector<Action>& actions) {
  Json out = Json::array();
  for (const Action& a : actions) out.push_back(to_json(a));
  return out;
}

// Wall-clock fields are left out unless asked for, so that repeated runs
// produce identical documents.
inline Json to_json(const RetrievalPlan& plan, bool timing = false) {
  Json j = {{"target", plan.target},
            {"method", to_string(plan.method)},
            {"total_cost", plan.total_cost},
            {"root_heuristic", plan.root_heuristic},
            {"surrogate_cost", plan.surrogate_cost},
            {"surrogate_removals", plan.surrogate_removals},
            {"nodes_expanded", plan.nodes_expanded},
            {"actions", actions_to_json(plan.actions)}};
  if (timing) j["elapsed_seconds"] = plan.elapsed.count();
  return j;
}

inline Json to_json(const SurrogateReport& report, bool with_breakdown = false) {
  Json j = {{"expected_cost", report.expected_cost},
            {"per_object_cost", report.per_object_cost},
            {"per_object_removals", report.per_object_removals}};
  if (with_breakdown) {
    const SurrogateBreakdown& b = report.breakdown;
    j["breakdown"] = {{"a", b.a},         {"e", b.e},         {"f", b.f},
                      {"d", b.d},         {"delta", b.delta}, {"tucked", b.tucked},
                      {"y", b.y},         {"b", b.b},         {"delta_push", b.delta_push},
                      {"delta_suction", b.delta_suction}};
  }
  return j;
}

// Occupancy as rows front to back, each row listing columns left to right.
inline Json occupancy_rows(const ShelfState& state, const ShelfGrid& grid) {
  Json rows = Json::array();
  for (int j = 1; j <= grid.m_y(); ++j) {
    Json row = Json::array();
    for (int i = 1; i <= grid.m_x(); ++i) row.push_back(state.occupancy[grid.index(i, j)]);
    rows.push_back(row);
  }
  return rows;
}

inline Json to_json(const EpisodeTrace& trace, const ShelfGrid& grid, bool timing = false) {
  Json steps = Json::array();
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const EpisodeStep& s = trace.steps[k];
    steps.push_back({{"target", s.target},
                     {"cost", s.cost},
                     {"cumulative_cost", trace.cumulative_cost[k]},
                     {"plan", to_json(s.plan, timing)},
                     {"executed", actions_to_json(s.executed)},
                     {"post_state", occupancy_rows(s.post_state, grid)}});
  }
  return {{"schema_version", kTraceSchemaVersion}, {"seed", trace.seed}, {"steps", steps}};
}

}  // namespace osa
