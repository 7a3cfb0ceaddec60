#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "osa/io.hpp"
#include "osa/lp_model.hpp"
#include "osa/solvers.hpp"
#include "osa/theorems.hpp"

namespace {

using osa::Arrangement;
using osa::ProblemInstance;
using osa::ShelfGrid;

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(OSA_TEST_DATA) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemInstance load_instance(const std::string& name) {
  return osa::instance_from_json(osa::Json::parse(read_file(name)));
}

TEST(LpModel, VariableCount) {
  const ProblemInstance inst(ShelfGrid(2, 2), {{1, 1, 1, 2}, {2, 1, 1, 2}}, 10);
  // 6 per (object, cell), 7 per cell, 1 per column.
  EXPECT_EQ(osa::build_model(inst).variables.size(), 6u * 2 * 4 + 7u * 4 + 2);
}

TEST(LpModel, SingleCellHasZeroObjective) {
  const ProblemInstance inst = load_instance("instance_1x1.json");
  const osa::LpModel m = osa::build_model(inst);
  const osa::LpCheck c = osa::verify_solution(m, osa::feasible_point(inst, Arrangement({{1, 1}})));
  EXPECT_TRUE(c.feasible());
  EXPECT_EQ(c.objective, 0.0);
}

TEST(LpModel, AssignmentViolationsAreReported) {
  const ProblemInstance inst(ShelfGrid(2, 2), {{1, 1, 1, 2}, {2, 1, 1, 2}}, 10);
  const osa::LpModel m = osa::build_model(inst);
  auto point = osa::feasible_point(inst, Arrangement({{1, 1}, {2, 1}}));
  for (auto& [name, v] : point) {
    if (name.rfind("x_", 0) == 0) v = 0.0;
  }
  bool assignment = false;
  for (const osa::LpViolation& v : osa::verify_solution(m, point).violations) {
    assignment = assignment || v.family == "object_assignment";
  }
  EXPECT_TRUE(assignment);

  point = osa::feasible_point(inst, Arrangement({{1, 1}, {2, 1}}));
  point["x_2_2_1"] = 0.0;
  point["x_2_1_1"] = 1.0;
  point["a_1_1"] = 2.0;
  point["a_2_1"] = 0.0;
  bool capacity = false;
  for (const osa::LpViolation& v : osa::verify_solution(m, point).violations) {
    capacity = capacity || v.family == "cell_capacity";
  }
  EXPECT_TRUE(capacity);
}

TEST(LpModel, MissingVariableThrows) {
  const ProblemInstance inst = load_instance("instance_1x1.json");
  EXPECT_THROW(osa::verify_solution(osa::build_model(inst), {}), osa::Error);
}

TEST(LpModel, FeasiblePointObjectiveIsSurrogate) {
  osa::Xoshiro256StarStar rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const ShelfGrid g(3, 3);
    const ProblemInstance inst =
        osa::random_instance(g, static_cast<int>(rng.uniform_int(1, 9)), 1.5, 10.0 * rng.uniform_int(0, 10), rng);
    const Arrangement arr = osa::random_arrangement(inst, rng);
    const osa::LpCheck c = osa::verify_solution(osa::build_model(inst), osa::feasible_point(inst, arr), 1e-9);
    EXPECT_TRUE(c.feasible()) << "trial " << trial << " " << (c.feasible() ? "" : c.violations[0].row);
    EXPECT_NEAR(c.objective, osa::surrogate_objective(inst, arr), 1e-9);
  }
}

TEST(LpWriter, SectionOrder) {
  const std::string text = osa::write_lp(osa::build_model(load_instance("instance_1x1.json")));
  std::size_t last = 0;
  for (const char* header : {"Minimize\n", "Subject To\n", "Bounds\n", "Binaries\n", "Generals\n", "End\n"}) {
    const std::size_t at = text.find(header);
    ASSERT_NE(at, std::string::npos) << header;
    EXPECT_GE(at, last) << header;
    last = at;
  }
}

TEST(LpWriter, LinesStayShort) {
  std::istringstream in(osa::write_lp(osa::build_model(load_instance("instance_3x3_n4.json"))));
  std::string line;
  while (std::getline(in, line)) EXPECT_LE(line.size(), 255u);
}

TEST(LpWriter, GoldenSingleCell) {
  EXPECT_EQ(osa::write_lp(osa::build_model(load_instance("instance_1x1.json"))), read_file("model_1x1.lp"));
}

TEST(LpWriter, GoldenThreeByThree) {
  const ProblemInstance inst = load_instance("instance_3x3_n4.json");
  EXPECT_EQ(osa::write_lp(osa::build_model(inst)), read_file("model_3x3_n4.lp"));
  // Optimum confirmed offline with an external MIP solver on model_3x3_n4.lp.
  const osa::SolveResult best = osa::solve_bruteforce(inst, osa::Objective::Surrogate);
  const osa::LpCheck c = osa::verify_solution(osa::build_model(inst), osa::feasible_point(inst, best.arrangement));
  EXPECT_TRUE(c.feasible());
  EXPECT_NEAR(c.objective, best.objective_value, 1e-12);
}

TEST(Solution, ParsesNameValueLines) {
  std::istringstream in("# comment\n\\ also comment\n\nx_1_1_1 1\n  b_1_1_1   0.5\n");
  const auto v = osa::parse_solution(in);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.at("x_1_1_1"), 1.0);
  EXPECT_EQ(v.at("b_1_1_1"), 0.5);
  std::istringstream bad("x_1_1_1\n");
  EXPECT_THROW(osa::parse_solution(bad), osa::Error);
}

}  // namespace
