#pragma once

// Shelf geometry, problem instances and arrangements.
//
// Cells are addressed as (i, j) with 1 <= i <= m_x (columns, left to right)
// and 1 <= j <= m_y (rows). Row j = 1 is the open front of the shelf, row m_y
// touches the back wall. An object is reachable when every cell in front of
// it in its own column is empty.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Cell {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

// Exact non-negative rational, always stored in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num * b.den <=> b.num * a.den;
  }
};

class ShelfGrid {
 public:
  ShelfGrid(int m_x, int m_y) : m_x_(m_x), m_y_(m_y) {
    if (m_x < 1 || m_y < 1) throw Error("shelf grid dimensions must be positive");
  }

  int m_x() const { return m_x_; }
  int m_y() const { return m_y_; }
  int cell_count() const { return m_x_ * m_y_; }

  bool contains(Cell c) const { return c.i >= 1 && c.i <= m_x_ && c.j >= 1 && c.j <= m_y_; }

  // Dense index in lexicographic (i, j) order.
  int index(Cell c) const { return (c.i - 1) * m_y_ + (c.j - 1); }
  int index(int i, int j) const { return (i - 1) * m_y_ + (j - 1); }
  Cell cell(int k) const { return {k / m_y_ + 1, k % m_y_ + 1}; }

  friend bool operator==(const ShelfGrid&, const ShelfGrid&) = default;

 private:
  int m_x_;
  int m_y_;
};

struct ObjectSpec {
  int id = 0;
  double p = 0.0;
  double c_push = 0.0;
  double c_suction = 0.0;

  double delta_cost() const { return c_suction - c_push; }
};

// Immutable OSA input. Probabilities are renormalized to sum to one.
class ProblemInstance {
 public:
  ProblemInstance(ShelfGrid grid, std::vector<ObjectSpec> objects, double c_removal)
      : grid_(grid), objects_(std::move(objects)), c_removal_(c_removal) {
    if (!(c_removal_ >= 0.0) || !std::isfinite(c_removal_)) {
      throw Error("removal penalty must be a finite non-negative number");
    }
    if (static_cast<int>(objects_.size()) > grid_.cell_count()) {
      throw Error("more objects than shelf cells");
    }
    std::sort(objects_.begin(), objects_.end(),
              [](const ObjectSpec& a, const ObjectSpec& b) { return a.id < b.id; });
    double total = 0.0;
    for (std::size_t k = 0; k < objects_.size(); ++k) {
      const ObjectSpec& o = objects_[k];
      if (o.id != static_cast<int>(k) + 1) {
        throw Error("object ids must be unique and contiguous from 1");
      }
      if (!(o.p >= 0.0) || !std::isfinite(o.p)) throw Error("object probability must be non-negative");
      if (!(o.c_push >= 0.0) || !std::isfinite(o.c_push)) throw Error("push cost must be non-negative");
      if (!(o.c_suction >= o.c_push) || !std::isfinite(o.c_suction)) {
        throw Error("suction cost must not be below push cost");
      }
      total += o.p;
    }
    if (!objects_.empty()) {
      if (!(total > 0.0)) throw Error("retrieval probabilities sum to zero");
      for (ObjectSpec& o : objects_) o.p /= total;
    }
  }

  const ShelfGrid& grid() const { return grid_; }
  int n() const { return static_cast<int>(objects_.size()); }
  double c_removal() const { return c_removal_; }
  const std::vector<ObjectSpec>& objects() const { return objects_; }

  const ObjectSpec& object(int id) const {
    if (id < 1 || id > n()) throw Error("unknown object id " + std::to_string(id));
    return objects_[id - 1];
  }
  double p(int id) const { return object(id).p; }
  double c_push(int id) const { return object(id).c_push; }
  double c_suction(int id) const { return object(id).c_suction; }

 private:
  ShelfGrid grid_;
  std::vector<ObjectSpec> objects_;
  double c_removal_;
};

// Injective assignment object id -> cell. Entry k holds the cell of object k + 1.
class Arrangement {
 public:
  Arrangement() = default;
  explicit Arrangement(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::vector<Cell> sorted = cells_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error("arrangement places two objects in the same cell");
    }
  }

  int size() const { return static_cast<int>(cells_.size()); }
  const std::vector<Cell>& cells() const { return cells_; }

  Cell cell_of(int id) const {
    if (id < 1 || id > size()) throw Error("unknown object id " + std::to_string(id));
    return cells_[id - 1];
  }

  void check(const ShelfGrid& grid) const {
    for (const Cell& c : cells_) {
      if (!grid.contains(c)) throw Error("cell " + to_string(c) + " is outside the shelf");
    }
  }

  void check(const ProblemInstance& instance) const {
    if (size() != instance.n()) throw Error("arrangement does not match the instance object count");
    check(instance.grid());
  }

  // Cell-indexed occupancy: 0 for empty, otherwise the object id.
  std::vector<int> occupancy(const ShelfGrid& grid) const {
    check(grid);
    std::vector<int> occ(grid.cell_count(), 0);
    for (int k = 0; k < size(); ++k) occ[grid.index(cells_[k])] = k + 1;
    return occ;
  }

  static Arrangement from_occupancy(const ShelfGrid& grid, std::span<const int> occ, int n) {
    std::vector<Cell> cells(n);
    std::vector<bool> seen(n, false);
    for (int k = 0; k < grid.cell_count(); ++k) {
      const int id = occ[k];
      if (id == 0) continue;
      if (id < 1 || id > n || seen[id - 1]) throw Error("occupancy is not a valid arrangement");
      seen[id - 1] = true;
      cells[id - 1] = grid.cell(k);
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw Error("occupancy does not place every object");
    }
    return Arrangement(std::move(cells));
  }

  friend bool operator==(const Arrangement&, const Arrangement&) = default;
  friend auto operator<=>(const Arrangement& a, const Arrangement& b) { return a.cells_ <=> b.cells_; }

 private:
  std::vector<Cell> cells_;
};

inline Rational density(int n, const ShelfGrid& grid) { return {n, grid.cell_count()}; }

inline Rational density(const ProblemInstance& instance) {
  return density(instance.n(), instance.grid());
}

// 1 - 1/m_x + 1/(m_x m_y), written over the common denominator m_x m_y.
inline Rational dense_threshold(const ShelfGrid& grid) {
  return {static_cast<std::int64_t>(grid.m_x()) * grid.m_y() - grid.m_y() + 1, grid.cell_count()};
}

inline bool is_dense(int n, const ShelfGrid& grid) { return density(n, grid) > dense_threshold(grid); }

inline bool is_dense(const ProblemInstance& instance) { return is_dense(instance.n(), instance.grid()); }

inline bool is_accessible(const Arrangement& arr, const ShelfGrid& grid, int object_id) {
  const Cell target = arr.cell_of(object_id);
  arr.check(grid);
  for (const Cell& c : arr.cells()) {
    if (c.i == target.i && c.j < target.j) return false;
  }
  return true;
}

// Empty cells that have an occupied cell in front of them, lexicographically sorted.
inline std::vector<Cell> cavities(const Arrangement& arr, const ShelfGrid& grid) {
  const std::vector<int> occ = arr.occupancy(grid);
  std::vector<Cell> out;
  for (int i = 1; i <= grid.m_x(); ++i) {
    bool blocked = false;
    for (int j = 1; j <= grid.m_y(); ++j) {
      const bool occupied = occ[grid.index(i, j)] != 0;
      if (occupied) {
        blocked = true;
      } else if (blocked) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

inline bool is_hollow(const Arrangement& arr, const ShelfGrid& grid) { return !cavities(arr, grid).empty(); }

// Packs every column against the back wall, keeping front-to-back order.
inline Arrangement consolidate(const Arrangement& arr, const ShelfGrid& grid) {
  const std::vector<int> occ = arr.occupancy(grid);
  std::vector<Cell> cells = arr.cells();
  for (int i = 1; i <= grid.m_x(); ++i) {
    int slot = grid.m_y();
    for (int j = grid.m_y(); j >= 1; --j) {
      const int id = occ[grid.index(i, j)];
      if (id != 0) cells[id - 1] = {i, slot--};
    }
  }
  return Arrangement(std::move(cells));
}

struct RemovalFreeResult {
  bool exists = false;
  std::optional<Arrangement> witness;
};

// An arrangement needing no removals exists exactly when the shelf is not
// dense. The witness fills the back rows completely and puts the remaining
// r objects left-to-right in the row just in front of them, so k front rows
// are not full and every column satisfies
//   k (m_x - 1) - (r - u) >= m_y - k + u - 1
// where u is the number of the r objects landing in that column.
inline RemovalFreeResult removal_free_arrangement(const ProblemInstance& instance) {
  RemovalFreeResult result;
  if (is_dense(instance)) return result;
  const ShelfGrid& grid = instance.grid();
  const int n = instance.n();
  const int m_x = grid.m_x();
  const int m_y = grid.m_y();
  const int full_rows = n / m_x;
  const int k = m_y - full_rows;
  const int r = n % m_x;
  for (int i = 1; i <= m_x; ++i) {
    const int u = i <= r ? 1 : 0;
    if (k * (m_x - 1) - (r - u) < m_y - k + u - 1 && (full_rows > 0 || u > 0)) {
      throw Error("removal-free witness construction failed");
    }
  }

  // Occupied cells front to back, then left to right, receive ids in order.
  std::vector<Cell> cells;
  cells.reserve(n);
  for (int i = 1; i <= r; ++i) cells.push_back({i, k});
  for (int j = k + 1; j <= m_y; ++j) {
    for (int i = 1; i <= m_x; ++i) cells.push_back({i, j});
  }
  result.exists = true;
  result.witness = Arrangement(std::move(cells));
  return result;
}

}  // namespace osa
