#pragma once

// Fully linearized arrangement program as an explicit linear model, CPLEX LP
// text output, and a checker for candidate solutions.
//
// Side walls are not modeled as variables: wherever a row refers to column 0
// or m_x + 1 the wall constants a = 1, f = 0 (hence h = 0) are substituted.

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "osa/shelf.hpp"
#include "osa/surrogate.hpp"

namespace osa {

enum class VarKind { Binary, Integer, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct LpVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct LpTerm {
  int var = 0;
  double coef = 0.0;
};

struct LpRow {
  std::string name;
  std::string family;
  std::vector<LpTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

class LpModel {
 public:
  double big_m = 0.0;
  std::vector<LpVariable> variables;
  std::vector<LpTerm> objective;
  std::vector<LpRow> rows;

  int add_variable(std::string name, VarKind kind, double lower = 0.0,
                   double upper = std::numeric_limits<double>::infinity()) {
    const auto [it, inserted] = lookup_.emplace(name, static_cast<int>(variables.size()));
    if (!inserted) return it->second;
    variables.push_back({std::move(name), kind, lower, upper});
    return it->second;
  }

  int var(const std::string& name) const {
    const auto it = lookup_.find(name);
    if (it == lookup_.end()) throw Error("unknown LP variable " + name);
    return it->second;
  }

  bool has_var(const std::string& name) const { return lookup_.count(name) != 0; }

  std::size_t family_size(const std::string& family) const {
    std::size_t count = 0;
    for (const LpRow& r : rows) count += r.family == family ? 1 : 0;
    return count;
  }

  // Family names in first-appearance order.
  std::vector<std::string> families() const {
    std::vector<std::string> out;
    for (const LpRow& r : rows) {
      if (std::find(out.begin(), out.end(), r.family) == out.end()) out.push_back(r.family);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, int> lookup_;
};

namespace detail {

inline std::string join_index(std::initializer_list<int> parts) {
  std::string s;
  for (int v : parts) {
    s += '_';
    s += std::to_string(v);
  }
  return s;
}

}  // namespace detail

inline LpModel build_model(const ProblemInstance& instance) {
  const ShelfGrid& grid = instance.grid();
  const int m_x = grid.m_x();
  const int m_y = grid.m_y();
  const int n = instance.n();
  using detail::join_index;

  LpModel model;
  double suction_total = 0.0;
  for (const ObjectSpec& o : instance.objects()) suction_total += o.c_suction;
  const double M = grid.cell_count() + suction_total + 1.0;
  model.big_m = M;

  auto X = [&](int l, int i, int j) { return model.add_variable("x" + join_index({l, i, j}), VarKind::Binary); };
  auto Y = [&](int l, int i, int j) { return model.add_variable("y" + join_index({l, i, j}), VarKind::Continuous); };
  auto B = [&](int l, int i, int j) {
    return model.add_variable("b" + join_index({l, i, j}), VarKind::Integer, 0.0, m_y - 1);
  };
  auto Z = [&](int l, int i, int j) { return model.add_variable("z" + join_index({l, i, j}), VarKind::Binary); };
  auto DP = [&](int l, int i, int j) { return model.add_variable("dp" + join_index({l, i, j}), VarKind::Binary); };
  auto DS = [&](int l, int i, int j) { return model.add_variable("ds" + join_index({l, i, j}), VarKind::Binary); };
  auto A = [&](int i, int j) { return model.add_variable("a" + join_index({i, j}), VarKind::Integer); };
  auto E = [&](int i, int j) { return model.add_variable("e" + join_index({i, j}), VarKind::Integer, 0.0, m_y); };
  auto F = [&](int i, int j) { return model.add_variable("f" + join_index({i, j}), VarKind::Binary); };
  auto D = [&](int i) { return model.add_variable("d" + join_index({i}), VarKind::Integer, 0.0, m_y); };
  auto DELTA = [&](int i, int j) { return model.add_variable("delta" + join_index({i, j}), VarKind::Binary); };
  auto DT = [&](int i, int j) { return model.add_variable("dt" + join_index({i, j}), VarKind::Binary); };
  auto G = [&](int i, int j) { return model.add_variable("g" + join_index({i, j}), VarKind::Binary); };
  auto H = [&](int i, int j) { return model.add_variable("h" + join_index({i, j}), VarKind::Binary); };
  auto inside = [&](int i) { return i >= 1 && i <= m_x; };

  auto row = [&](const std::string& family, std::string suffix, std::vector<LpTerm> terms, Sense sense,
                 double rhs) { model.rows.push_back({family + suffix, family, std::move(terms), sense, rhs}); };

  // Objective symbols first so they lead the registry.
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) model.objective.push_back({Y(l, i, j), instance.p(l)});
    }
  }
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) model.objective.push_back({B(l, i, j), instance.p(l) * instance.c_removal()});
    }
  }

  for (int l = 1; l <= n; ++l) {
    std::vector<LpTerm> t;
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) t.push_back({X(l, i, j), 1.0});
    }
    row("object_assignment", join_index({l}), std::move(t), Sense::Equal, 1.0);
  }

  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      std::vector<LpTerm> t{{A(i, j), 1.0}};
      for (int l = 1; l <= n; ++l) t.push_back({X(l, i, j), -1.0});
      row("cell_occupancy", join_index({i, j}), std::move(t), Sense::Equal, 0.0);
      row("cell_capacity", join_index({i, j}), {{A(i, j), 1.0}}, Sense::LessEqual, 1.0);
    }
  }

  // delta + M a_{i-1} + M a_{i+1} <= 2M, walls contribute M each.
  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      std::vector<LpTerm> t{{DELTA(i, j), 1.0}};
      double rhs = 2.0 * M;
      for (int ii : {i - 1, i + 1}) {
        if (inside(ii)) {
          t.push_back({A(ii, j), M});
        } else {
          rhs -= M;
        }
      }
      row("push_indicator", join_index({i, j}), std::move(t), Sense::LessEqual, rhs);
    }
  }

  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        const std::string s = join_index({l, i, j});
        row("push_flag_x", s, {{DP(l, i, j), 1.0}, {X(l, i, j), -1.0}}, Sense::LessEqual, 0.0);
        row("push_flag_delta", s, {{DP(l, i, j), 1.0}, {DELTA(i, j), -1.0}}, Sense::LessEqual, 0.0);
        row("push_flag_both", s, {{DP(l, i, j), 1.0}, {X(l, i, j), -1.0}, {DELTA(i, j), -1.0}},
            Sense::GreaterEqual, -1.0);
      }
    }
  }
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        const std::string s = join_index({l, i, j});
        row("suction_flag_x", s, {{DS(l, i, j), 1.0}, {X(l, i, j), -1.0}}, Sense::LessEqual, 0.0);
        row("suction_flag_delta", s, {{DS(l, i, j), 1.0}, {DELTA(i, j), 1.0}}, Sense::LessEqual, 1.0);
        row("suction_flag_both", s, {{DS(l, i, j), 1.0}, {X(l, i, j), -1.0}, {DELTA(i, j), 1.0}},
            Sense::GreaterEqual, 0.0);
      }
    }
  }

  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        std::vector<LpTerm> t;
        for (int other = 1; other <= n; ++other) {
          if (other == l) continue;
          for (int jj = 1; jj < j; ++jj) {
            t.push_back({DP(other, i, jj), instance.c_push(other)});
            t.push_back({DS(other, i, jj), instance.c_suction(other)});
          }
        }
        t.push_back({Y(l, i, j), -1.0});
        t.push_back({Z(l, i, j), -M});
        row("relocation_cost", join_index({l, i, j}), std::move(t), Sense::LessEqual, 0.0);
      }
    }
  }
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        row("assignment_negation", join_index({l, i, j}), {{X(l, i, j), 1.0}, {Z(l, i, j), 1.0}},
            Sense::LessEqual, 1.0);
      }
    }
  }

  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      std::vector<LpTerm> t{{E(i, j), 1.0}};
      for (int jj = 1; jj <= j; ++jj) t.push_back({A(i, jj), -1.0});
      row("prefix_count", join_index({i, j}), std::move(t), Sense::Equal, 0.0);
    }
  }
  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      row("clear_front", join_index({i, j}), {{E(i, j), 1.0}, {F(i, j), M}}, Sense::LessEqual, M);
    }
  }
  for (int i = 1; i <= m_x; ++i) {
    std::vector<LpTerm> t{{D(i), 1.0}};
    for (int j = 1; j <= m_y; ++j) t.push_back({F(i, j), -1.0});
    row("front_empty_count", join_index({i}), std::move(t), Sense::Equal, 0.0);
  }

  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      const std::string s = join_index({i, j});
      row("tuck_occupied", s, {{DT(i, j), 1.0}, {A(i, j), -1.0}}, Sense::LessEqual, 0.0);
      row("tuck_gap", s, {{DT(i, j), 1.0}, {G(i, j), -1.0}}, Sense::LessEqual, 0.0);
      row("tuck_both", s, {{DT(i, j), 1.0}, {A(i, j), -1.0}, {G(i, j), -1.0}}, Sense::GreaterEqual, -1.0);
    }
  }
  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      const std::string s = join_index({i, j});
      row("hole_not_occupied", s, {{H(i, j), 1.0}, {A(i, j), 1.0}}, Sense::LessEqual, 1.0);
      row("hole_not_clear", s, {{H(i, j), 1.0}, {F(i, j), 1.0}}, Sense::LessEqual, 1.0);
      row("hole_cover", s, {{H(i, j), 1.0}, {A(i, j), 1.0}, {F(i, j), 1.0}}, Sense::GreaterEqual, 1.0);
    }
  }
  for (int i = 1; i <= m_x; ++i) {
    for (int j = 1; j <= m_y; ++j) {
      const std::string s = join_index({i, j});
      std::vector<LpTerm> left{{G(i, j), 1.0}};
      if (inside(i - 1)) left.push_back({H(i - 1, j), -1.0});
      row("gap_left", s, std::move(left), Sense::GreaterEqual, 0.0);
      std::vector<LpTerm> right{{G(i, j), 1.0}};
      if (inside(i + 1)) right.push_back({H(i + 1, j), -1.0});
      row("gap_right", s, std::move(right), Sense::GreaterEqual, 0.0);
      std::vector<LpTerm> either{{G(i, j), 1.0}};
      if (inside(i - 1)) either.push_back({H(i - 1, j), -1.0});
      if (inside(i + 1)) either.push_back({H(i + 1, j), -1.0});
      row("gap_either", s, std::move(either), Sense::LessEqual, 0.0);
    }
  }

  // e - x - sum_{j'<j} dt - sum_{i' != i} d - b - M z <= 0
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        std::vector<LpTerm> t{{E(i, j), 1.0}, {X(l, i, j), -1.0}};
        for (int jj = 1; jj < j; ++jj) t.push_back({DT(i, jj), -1.0});
        for (int ii = 1; ii <= m_x; ++ii) {
          if (ii != i) t.push_back({D(ii), -1.0});
        }
        t.push_back({B(l, i, j), -1.0});
        t.push_back({Z(l, i, j), -M});
        row("removal_count", join_index({l, i, j}), std::move(t), Sense::LessEqual, 0.0);
      }
    }
  }
  return model;
}

// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string write_lp(const LpModel& model) {
  std::string out;
  constexpr std::size_t kWidth = 78;
  std::string line;
  auto flush = [&] {
    out += line;
    out += '\n';
    line.clear();
  };
  auto emit = [&](const std::string& token) {
    if (line.size() + 1 + token.size() > kWidth && line.size() > 3) {
      flush();
      line = "   ";
    }
    if (!line.empty() && line.back() != ' ') line += ' ';
    line += token;
  };
  auto emit_terms = [&](const std::vector<LpTerm>& terms) {
    bool first = true;
    for (const LpTerm& t : terms) {
      if (t.coef == 0.0) continue;
      const double mag = std::abs(t.coef);
      std::string token = t.coef < 0 ? "- " : (first ? "" : "+ ");
      if (mag != 1.0) token += format_number(mag) + " ";
      token += model.variables[t.var].name;
      emit(token);
      first = false;
    }
    return !first;
  };

  out += "\\ Optimal shelf arrangement, linearized surrogate program\n";
  out += "Minimize\n";
  line = " obj:";
  if (!emit_terms(model.objective)) emit("0 " + model.variables.front().name);
  flush();

  out += "Subject To\n";
  for (const LpRow& r : model.rows) {
    line = " " + r.name + ":";
    if (!emit_terms(r.terms)) emit("0 " + model.variables.front().name);
    const char* op = r.sense == Sense::LessEqual ? "<=" : r.sense == Sense::GreaterEqual ? ">=" : "=";
    emit(std::string(op) + " " + format_number(r.rhs));
    flush();
  }

  out += "Bounds\n";
  for (const LpVariable& v : model.variables) {
    if (v.kind == VarKind::Binary) continue;
    if (v.lower == 0.0 && std::isinf(v.upper)) continue;
    out += " " + format_number(v.lower) + " <= " + v.name;
    if (!std::isinf(v.upper)) out += " <= " + format_number(v.upper);
    out += '\n';
  }

  auto section = [&](const char* title, VarKind kind) {
    out += title;
    out += '\n';
    line = " ";
    for (const LpVariable& v : model.variables) {
      if (v.kind == kind) emit(v.name);
    }
    if (line.size() > 1) flush();
    line.clear();
  };
  section("Binaries", VarKind::Binary);
  section("Generals", VarKind::Integer);
  out += "End\n";
  return out;
}

struct LpViolation {
  std::string row;
  std::string family;
  double lhs = 0.0;
  double rhs = 0.0;
  double amount = 0.0;
};

struct LpCheck {
  std::vector<LpViolation> violations;
  double objective = 0.0;
  bool feasible() const { return violations.empty(); }
};

// Checks every row, bound and integrality requirement with tolerance `tol`.
inline LpCheck verify_solution(const LpModel& model, const std::map<std::string, double>& values,
                               double tol = 1e-6) {
  std::vector<double> x(model.variables.size(), 0.0);
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    const auto it = values.find(model.variables[k].name);
    if (it == values.end()) throw Error("solution misses variable " + model.variables[k].name);
    x[k] = it->second;
  }
  LpCheck check;
  for (const LpTerm& t : model.objective) check.objective += t.coef * x[t.var];
  for (const LpRow& r : model.rows) {
    double lhs = 0.0;
    for (const LpTerm& t : r.terms) lhs += t.coef * x[t.var];
    double excess = 0.0;
    if (r.sense == Sense::LessEqual) excess = lhs - r.rhs;
    if (r.sense == Sense::GreaterEqual) excess = r.rhs - lhs;
    if (r.sense == Sense::Equal) excess = std::abs(lhs - r.rhs);
    if (excess > tol) check.violations.push_back({r.name, r.family, lhs, r.rhs, excess});
  }
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    const LpVariable& v = model.variables[k];
    const double lo = v.kind == VarKind::Binary ? 0.0 : v.lower;
    const double hi = v.kind == VarKind::Binary ? 1.0 : v.upper;
    if (x[k] < lo - tol) check.violations.push_back({"bound:" + v.name, "bounds", x[k], lo, lo - x[k]});
    if (x[k] > hi + tol) check.violations.push_back({"bound:" + v.name, "bounds", x[k], hi, x[k] - hi});
    if (v.kind != VarKind::Continuous) {
      const double frac = std::abs(x[k] - std::round(x[k]));
      if (frac > tol) check.violations.push_back({"integrality:" + v.name, "integrality", x[k], std::round(x[k]), frac});
    }
  }
  return check;
}

// Assignment of every model variable induced by a fixed arrangement.
inline std::map<std::string, double> feasible_point(const ProblemInstance& instance, const Arrangement& arr) {
  const SurrogateReport report = evaluate_surrogate(instance, arr);
  const SurrogateBreakdown& bd = report.breakdown;
  const ShelfGrid& grid = instance.grid();
  const int m_x = grid.m_x();
  const int m_y = grid.m_y();
  using detail::join_index;

  std::vector<int> h(grid.cell_count(), 0);
  for (int k = 0; k < grid.cell_count(); ++k) h[k] = (bd.a[k] == 0 && bd.f[k] == 0) ? 1 : 0;
  auto h_at = [&](int i, int j) { return i < 1 || i > m_x ? 0 : h[grid.index(i, j)]; };

  std::map<std::string, double> v;
  for (int l = 1; l <= instance.n(); ++l) {
    const Cell c = arr.cell_of(l);
    for (int i = 1; i <= m_x; ++i) {
      for (int j = 1; j <= m_y; ++j) {
        const std::string s = join_index({l, i, j});
        const std::size_t slot = bd.entry(l, i, j);
        const int x = (c == Cell{i, j}) ? 1 : 0;
        v["x" + s] = x;
        v["z" + s] = 1 - x;
        v["y" + s] = bd.y[slot];
        v["b" + s] = bd.b[slot];
        v["dp" + s] = bd.delta_push[slot];
        v["ds" + s] = bd.delta_suction[slot];
      }
    }
  }
  for (int i = 1; i <= m_x; ++i) {
    v["d" + join_index({i})] = bd.d[i - 1];
    for (int j = 1; j <= m_y; ++j) {
      const std::string s = join_index({i, j});
      const int k = grid.index(i, j);
      v["a" + s] = bd.a[k];
      v["e" + s] = bd.e[k];
      v["f" + s] = bd.f[k];
      v["delta" + s] = bd.delta[k];
      v["dt" + s] = bd.tucked[k];
      v["h" + s] = h[k];
      v["g" + s] = (h_at(i - 1, j) || h_at(i + 1, j)) ? 1 : 0;
    }
  }
  return v;
}

// Parses whitespace-separated "name value" lines; blank lines and lines
// starting with '#' or '\' are skipped.
inline std::map<std::string, double> parse_solution(std::istream& in) {
  std::map<std::string, double> values;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream ls(text);
    std::string name;
    if (!(ls >> name) || name[0] == '#' || name[0] == '\\') continue;
    double value = 0.0;
    if (!(ls >> value)) throw Error("solution line " + std::to_string(line_no) + " has no numeric value");
    values[name] = value;
  }
  return values;
}

}  // namespace osa
