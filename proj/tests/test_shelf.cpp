#include <gtest/gtest.h>

#include <vector>

#include "osa/shelf.hpp"
#include "osa/surrogate.hpp"

namespace {

using osa::Arrangement;
using osa::Cell;
using osa::ObjectSpec;
using osa::ProblemInstance;
using osa::Rational;
using osa::ShelfGrid;

ProblemInstance uniform_instance(int m_x, int m_y, int n, double c_removal = 10.0) {
  std::vector<ObjectSpec> objects;
  for (int l = 1; l <= n; ++l) objects.push_back({l, 1.0, 1.0, 2.0});
  return ProblemInstance(ShelfGrid(m_x, m_y), objects, c_removal);
}

TEST(ShelfGrid, IndexIsLexicographicAndInvertible) {
  const ShelfGrid g(3, 4);
  EXPECT_EQ(g.index(1, 1), 0);
  EXPECT_EQ(g.index(1, 4), 3);
  EXPECT_EQ(g.index(2, 1), 4);
  for (int k = 0; k < g.cell_count(); ++k) EXPECT_EQ(g.index(g.cell(k)), k);
  EXPECT_THROW(ShelfGrid(0, 2), osa::Error);
}

TEST(ProblemInstance, NormalizesProbabilitiesAndValidates) {
  const ProblemInstance inst(ShelfGrid(2, 2), {{2, 1.0, 1, 1}, {1, 3.0, 2, 3}}, 5.0);
  EXPECT_EQ(inst.object(1).c_push, 2.0);
  EXPECT_DOUBLE_EQ(inst.p(1), 0.75);
  EXPECT_DOUBLE_EQ(inst.p(2), 0.25);
  EXPECT_THROW(ProblemInstance(ShelfGrid(1, 1), {{1, 1, 1, 1}, {2, 1, 1, 1}}, 0), osa::Error);
  EXPECT_THROW(ProblemInstance(ShelfGrid(2, 1), {{1, 1, 2, 1}}, 0), osa::Error);
  EXPECT_THROW(ProblemInstance(ShelfGrid(2, 1), {{1, 0, 1, 1}}, 0), osa::Error);
  EXPECT_THROW(ProblemInstance(ShelfGrid(2, 1), {{1, 1, 1, 1}}, -1), osa::Error);
  EXPECT_THROW(ProblemInstance(ShelfGrid(2, 1), {{2, 1, 1, 1}}, 0), osa::Error);
}

TEST(Arrangement, RejectsCollisionsAndOffShelfCells) {
  EXPECT_THROW(Arrangement({{1, 1}, {1, 1}}), osa::Error);
  const Arrangement a({{3, 1}});
  EXPECT_THROW(a.check(ShelfGrid(2, 2)), osa::Error);
  const ShelfGrid g(2, 2);
  const Arrangement b({{2, 1}, {1, 2}});
  const std::vector<int> occ = b.occupancy(g);
  EXPECT_EQ(occ, (std::vector<int>{0, 2, 1, 0}));
  EXPECT_EQ(Arrangement::from_occupancy(g, occ, 2), b);
}

TEST(Density, ExactRationals) {
  EXPECT_EQ(osa::density(3, ShelfGrid(2, 2)), Rational(3, 4));
  EXPECT_EQ(osa::density(10, ShelfGrid(4, 3)), Rational(5, 6));
  EXPECT_EQ(osa::density(16, ShelfGrid(5, 4)), Rational(4, 5));
}

TEST(IsDense, ThresholdIsStrict) {
  EXPECT_TRUE(osa::is_dense(4, ShelfGrid(2, 2)));
  EXPECT_EQ(osa::dense_threshold(ShelfGrid(4, 3)), Rational(5, 6));
  EXPECT_FALSE(osa::is_dense(10, ShelfGrid(4, 3)));
  EXPECT_TRUE(osa::is_dense(11, ShelfGrid(4, 3)));
  EXPECT_TRUE(osa::is_dense(8, ShelfGrid(3, 3)));
  EXPECT_EQ(osa::dense_threshold(ShelfGrid(3, 3)), Rational(7, 9));
}

TEST(IsAccessible, OnlyOwnColumnMatters) {
  const ShelfGrid g(3, 3);
  EXPECT_TRUE(osa::is_accessible(Arrangement({{2, 1}, {1, 3}}), g, 1));
  EXPECT_FALSE(osa::is_accessible(Arrangement({{2, 3}, {2, 1}}), g, 1));
  EXPECT_TRUE(osa::is_accessible(Arrangement({{2, 3}, {1, 1}, {1, 2}}), g, 1));
}

TEST(Cavities, EmptyCellsBehindObjects) {
  EXPECT_TRUE(osa::cavities(Arrangement({{1, 2}, {2, 2}}), ShelfGrid(2, 2)).empty());
  EXPECT_EQ(osa::cavities(Arrangement({{1, 1}}), ShelfGrid(2, 2)), (std::vector<Cell>{{1, 2}}));
  EXPECT_EQ(osa::cavities(Arrangement({{1, 1}, {1, 3}}), ShelfGrid(1, 3)), (std::vector<Cell>{{1, 2}}));
  EXPECT_TRUE(osa::is_hollow(Arrangement({{1, 1}}), ShelfGrid(1, 2)));
}

TEST(Consolidate, PacksBackKeepingOrder) {
  const ShelfGrid g(1, 4);
  const Arrangement packed = osa::consolidate(Arrangement({{1, 1}, {1, 3}}), g);
  EXPECT_EQ(packed, Arrangement({{1, 3}, {1, 4}}));
  EXPECT_EQ(osa::consolidate(packed, g), packed);
  EXPECT_EQ(osa::consolidate(Arrangement(), g).size(), 0);
}

TEST(Consolidate, NeverLeavesCavities) {
  const ShelfGrid g(3, 3);
  const Arrangement a({{1, 1}, {2, 2}, {3, 1}, {3, 3}, {1, 2}});
  EXPECT_FALSE(osa::is_hollow(osa::consolidate(a, g), g));
}

TEST(RemovalFree, DenseShelvesHaveNoWitness) {
  EXPECT_FALSE(osa::removal_free_arrangement(uniform_instance(2, 2, 4)).exists);
  for (int m_y = 2; m_y <= 5; ++m_y) EXPECT_FALSE(osa::removal_free_arrangement(uniform_instance(1, m_y, 2)).exists);
}

TEST(RemovalFree, WitnessNeedsNoRemovals) {
  const ProblemInstance inst = uniform_instance(4, 3, 10);
  const osa::RemovalFreeResult r = osa::removal_free_arrangement(inst);
  ASSERT_TRUE(r.exists);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(osa::evaluate_surrogate(inst, *r.witness).total_removals(), 0);
}

TEST(RemovalFree, WitnessOnEveryNonDenseSmallShelf) {
  for (int m_x = 1; m_x <= 5; ++m_x) {
    for (int m_y = 1; m_y <= 5; ++m_y) {
      for (int n = 1; n <= m_x * m_y; ++n) {
        const ProblemInstance inst = uniform_instance(m_x, m_y, n);
        const osa::RemovalFreeResult r = osa::removal_free_arrangement(inst);
        ASSERT_EQ(r.exists, !osa::is_dense(inst)) << m_x << "x" << m_y << " n=" << n;
        if (r.exists) {
          EXPECT_EQ(osa::evaluate_surrogate(inst, *r.witness).total_removals(), 0)
              << m_x << "x" << m_y << " n=" << n;
        }
      }
    }
  }
}

}  // namespace
