#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jrtp/lp.hpp"
#include "jrtp/oracle.hpp"

using namespace jrtp;

namespace {

struct Dense {
  std::vector<std::vector<double>> a;
  std::vector<double> b, c;
};

lp::Problem to_problem(const Dense& d) {
  lp::Problem p;
  p.num_rows = static_cast<int>(d.a.size());
  p.rhs = d.b;
  for (std::size_t j = 0; j < d.c.size(); ++j) {
    std::vector<lp::Problem::Entry> col;
    for (std::size_t r = 0; r < d.a.size(); ++r)
      if (d.a[r][j] != 0.0) col.push_back({static_cast<int>(r), d.a[r][j]});
    p.add_column(d.c[j], col);
  }
  return p;
}

// Bounded random LP: every column has a positive entry, so x is boxed.
Dense random_lp(std::mt19937_64& rng, int m, int n) {
  std::uniform_int_distribution<int> coef(0, 4), cost(-2, 6), rhs(0, 10);
  Dense d;
  d.a.assign(m, std::vector<double>(n, 0.0));
  d.b.resize(m);
  d.c.resize(n);
  for (int r = 0; r < m; ++r) {
    d.b[r] = rhs(rng);
    for (int j = 0; j < n; ++j) d.a[r][j] = coef(rng) == 0 ? 1.0 : coef(rng);
  }
  for (int j = 0; j < n; ++j) {
    d.c[j] = cost(rng);
    bool any = false;
    for (int r = 0; r < m; ++r) any = any || d.a[r][j] > 0;
    if (!any) d.a[0][j] = 1.0;
  }
  return d;
}

// Solves a small square system; false when singular.
bool solve_square(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double>& x) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-12) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < n; ++k) m[r][k] -= f * m[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  x.resize(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return true;
}

// Optimum by enumerating every vertex: choose n of the m + n inequalities tight.
double vertex_max(const Dense& d) {
  const int m = static_cast<int>(d.a.size());
  const int n = static_cast<int>(d.c.size());
  double best = -1e300;
  const int total = m + n;
  for (unsigned mask = 0; mask < (1u << total); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (int k = 0; k < total; ++k) {
      if (!(mask & (1u << k))) continue;
      if (k < m) {
        rows.push_back(d.a[k]);
        rhs.push_back(d.b[k]);
      } else {
        std::vector<double> e(n, 0.0);
        e[k - m] = 1.0;
        rows.push_back(e);
        rhs.push_back(0.0);
      }
    }
    std::vector<double> x;
    if (!solve_square(rows, rhs, x)) continue;
    bool ok = true;
    for (int j = 0; j < n; ++j) ok = ok && x[j] >= -1e-9;
    for (int r = 0; r < m && ok; ++r) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += d.a[r][j] * x[j];
      ok = s <= d.b[r] + 1e-9;
    }
    if (!ok) continue;
    double v = 0;
    for (int j = 0; j < n; ++j) v += d.c[j] * x[j];
    best = std::max(best, v);
  }
  return best;
}

void expect_certificate(const Dense& d, const lp::Result& r) {
  const int m = static_cast<int>(d.a.size());
  const int n = static_cast<int>(d.c.size());
  ASSERT_EQ(r.status, lp::Status::Optimal);
  double primal = 0, dual = 0;
  for (int j = 0; j < n; ++j) {
    EXPECT_GE(r.x[j], -1e-9);
    primal += d.c[j] * r.x[j];
    double col = 0;
    for (int i = 0; i < m; ++i) col += d.a[i][j] * r.duals[i];
    EXPECT_GE(col, d.c[j] - 1e-7);
  }
  for (int i = 0; i < m; ++i) {
    EXPECT_GE(r.duals[i], -1e-9);
    double s = 0;
    for (int j = 0; j < n; ++j) s += d.a[i][j] * r.x[j];
    EXPECT_LE(s, d.b[i] + 1e-7);
    dual += d.b[i] * r.duals[i];
  }
  EXPECT_NEAR(primal, r.objective, 1e-7);
  EXPECT_NEAR(dual, r.objective, 1e-7);
}

}  // namespace

TEST(Lp, MatchesVertexEnumerationAndTableau) {
  std::mt19937_64 rng(2024);
  const lp::RevisedSimplex simplex;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 5);
    const Dense d = random_lp(rng, m, n);
    const lp::Result r = simplex.solve(to_problem(d), {});
    expect_certificate(d, r);
    const double want = std::max(0.0, vertex_max(d));
    EXPECT_NEAR(r.objective, want, 1e-7) << "trial " << trial;
    EXPECT_NEAR(oracle::detail::tableau_max(d.a, d.b, d.c), want, 1e-7) << "trial " << trial;
  }
}

TEST(Lp, WarmStartAfterAddingColumns) {
  std::mt19937_64 rng(7);
  const lp::RevisedSimplex simplex;
  for (int trial = 0; trial < 100; ++trial) {
    Dense d = random_lp(rng, 6, 4);
    const lp::Result first = simplex.solve(to_problem(d), {});
    ASSERT_EQ(first.status, lp::Status::Optimal);
    Dense more = random_lp(rng, 6, 3);
    for (int r = 0; r < 6; ++r) d.a[r].insert(d.a[r].end(), more.a[r].begin(), more.a[r].end());
    d.c.insert(d.c.end(), more.c.begin(), more.c.end());
    // Slack ids shift by the number of new columns.
    std::vector<int> basis = first.basis;
    for (int& v : basis)
      if (v >= 4) v += 3;
    const lp::Result warm = simplex.solve(to_problem(d), basis);
    const lp::Result cold = simplex.solve(to_problem(d), {});
    expect_certificate(d, warm);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-7);
    EXPECT_LE(warm.iterations, cold.iterations + 6);
  }
}

TEST(Lp, DegenerateProblemTerminates) {
  // Many tied ratios at b = 0.
  Dense d;
  const int m = 8, n = 8;
  d.a.assign(m, std::vector<double>(n, 1.0));
  d.b.assign(m, 0.0);
  d.b[m - 1] = 1.0;
  d.c.assign(n, 1.0);
  const lp::Result r = lp::RevisedSimplex{}.solve(to_problem(d), {});
  expect_certificate(d, r);
  EXPECT_NEAR(r.objective, 0.0, 1e-9);
}

TEST(Lp, UnboundedIsReported) {
  lp::Problem p;
  p.num_rows = 1;
  p.rhs = {1.0};
  p.add_column(1.0, {{0, 1.0}});
  p.add_column(1.0, {});
  EXPECT_EQ(lp::RevisedSimplex{}.solve(p, {}).status, lp::Status::Unbounded);
}

TEST(Lp, InputChecks) {
  lp::Problem p;
  p.num_rows = 1;
  p.rhs = {-1.0};
  EXPECT_THROW(lp::RevisedSimplex{}.solve(p, {}), std::invalid_argument);
  p.rhs = {1.0};
  p.add_column(1.0, {{3, 1.0}});
  EXPECT_THROW(lp::RevisedSimplex{}.solve(p, {}), std::invalid_argument);
  EXPECT_EQ(lp::make_backend("bundled")->name(), "bundled");
  EXPECT_THROW(lp::make_backend("external"), std::invalid_argument);
  EXPECT_THROW(lp::make_backend("nope"), std::invalid_argument);
}
