#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <numeric>
#include <random>

#include "emo/assignment.hpp"

using namespace emo;

namespace {

// exhaustive minimum over all full permutations of a square matrix
double brute_force_min(const CostMatrix& costs) {
  const int n = (int)costs.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double total = 0;
    for (int i = 0; i < n; ++i) total += costs[i][perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double matched_total(const CostMatrix& costs, const AssignmentResult& r) {
  double total = 0;
  for (const auto& [i, j] : r.matches) total += costs[i][j];
  return total;
}

}  // namespace

TEST_CASE("diagonal-favoring matrix matches the diagonal") {
  const CostMatrix costs{{0, 1}, {1, 0}};
  const auto r = solve_assignment(costs, 0.9);
  REQUIRE(r.matches.size() == 2);
  CHECK(r.matches[0] == std::pair<int, int>{0, 0});
  CHECK(r.matches[1] == std::pair<int, int>{1, 1});
  CHECK(r.unmatched_rows.empty());
  CHECK(r.unmatched_cols.empty());
}

TEST_CASE("everything above the gate stays unmatched") {
  const CostMatrix costs{{0.8, 0.9}, {0.95, 0.85}};
  const auto r = solve_assignment(costs, 0.7);
  CHECK(r.matches.empty());
  CHECK(r.unmatched_rows == std::vector<int>{0, 1});
  CHECK(r.unmatched_cols == std::vector<int>{0, 1});
}

TEST_CASE("rectangular input leaves extras unmatched") {
  const CostMatrix costs{{0.1, 0.2, 0.3}};
  const auto r = solve_assignment(costs, 1.0);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0] == std::pair<int, int>{0, 0});
  CHECK(r.unmatched_cols == std::vector<int>{1, 2});
}

TEST_CASE("empty inputs") {
  CHECK(solve_assignment({}, 1.0).matches.empty());
  const auto r = solve_assignment(CostMatrix{{}, {}}, 1.0);
  CHECK(r.matches.empty());
  CHECK(r.unmatched_rows.size() == 2);
}

TEST_CASE("optimal on every 2x2 and 1x1 matrix over the 5-value grid") {
  const double grid[5] = {0, 0.25, 0.5, 0.75, 1.0};
  for (double v : grid) {
    const CostMatrix m{{v}};
    CHECK(matched_total(m, solve_assignment(m, 1e9)) == brute_force_min(m));
  }
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c)
        for (int d = 0; d < 5; ++d) {
          const CostMatrix m{{grid[a], grid[b]}, {grid[c], grid[d]}};
          CHECK(matched_total(m, solve_assignment(m, 1e9)) == brute_force_min(m));
        }
}

TEST_CASE("optimal on random 3x3 and 4x4 grid matrices") {
  const double grid[5] = {0, 0.25, 0.5, 0.75, 1.0};
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 2000; ++iter) {
    const int n = 3 + (int)(rng() % 2);
    CostMatrix m(n, std::vector<double>(n));
    for (auto& row : m)
      for (auto& v : row) v = grid[rng() % 5];
    CHECK(matched_total(m, solve_assignment(m, 1e9)) == Catch::Approx(brute_force_min(m)));
  }
}

TEST_CASE("every index appears at most once across the result") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    const int rows = 1 + (int)(rng() % 5), cols = 1 + (int)(rng() % 5);
    CostMatrix m(rows, std::vector<double>(cols));
    for (auto& row : m)
      for (auto& v : row) v = double(rng() % 100) / 100.0;
    const auto r = solve_assignment(m, 0.8);
    std::vector<int> row_seen, col_seen;
    for (const auto& [i, j] : r.matches) {
      row_seen.push_back(i);
      col_seen.push_back(j);
      CHECK(m[i][j] < 0.8);  // gate respected
    }
    for (int i : r.unmatched_rows) row_seen.push_back(i);
    for (int j : r.unmatched_cols) col_seen.push_back(j);
    std::sort(row_seen.begin(), row_seen.end());
    std::sort(col_seen.begin(), col_seen.end());
    CHECK(std::adjacent_find(row_seen.begin(), row_seen.end()) == row_seen.end());
    CHECK(std::adjacent_find(col_seen.begin(), col_seen.end()) == col_seen.end());
    CHECK((int)row_seen.size() == rows);
    CHECK((int)col_seen.size() == cols);
  }
}
