#include <doctest.h>

#include <cmath>
#include <random>

#include "sisctl/bvp.hpp"
#include "sisctl/error.hpp"
#include "sisctl/validation.hpp"

using namespace sisctl;

namespace {

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

LinearCoefficients constant_source(const Grid& g, const ModelParams& p, double c) {
  const PolicyField u = PolicyField::constant(g, {0.6, 0.4});
  LinearCoefficients coeffs = coefficients_for(u, p, CostParams{});
  std::fill(coeffs.source.begin(), coeffs.source.end(), c);
  return coeffs;
}

}  // namespace

TEST_CASE("Thomas solver agrees with dense elimination") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {2u, 3u, 10u, 57u}) {
    TridiagonalSystem sys{std::vector<double>(n, 0.0), std::vector<double>(n),
                          std::vector<double>(n, 0.0), std::vector<double>(n)};
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) sys.lower[i] = u(rng);
      if (i + 1 < n) sys.upper[i] = u(rng);
      sys.diag[i] = 3.0 + u(rng);
      sys.rhs[i] = u(rng);
      dense[i][i] = sys.diag[i];
      if (i > 0) dense[i][i - 1] = sys.lower[i];
      if (i + 1 < n) dense[i][i + 1] = sys.upper[i];
    }
    const auto x = solve_tridiagonal(sys);
    const auto ref = dense_solve(dense, sys.rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-12);
  }
}

TEST_CASE("singular systems report the failing row") {
  TridiagonalSystem sys{{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 0.0}, {1.0, 2.0, 3.0}};
  try {
    solve_tridiagonal(sys);
    FAIL("expected SingularSystemError");
  } catch (const SingularSystemError& e) {
    CHECK(e.row() == 1);
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("constant source reproduces c / delta") {
  const ModelParams p;
  const Grid g{0.01, 0.99, 400};
  const double c = 0.5;
  const auto coeffs = constant_source(g, p, c);
  const ValueField v = solve_bellman(g, coeffs, {c / p.delta, 0.0});
  for (double value : v.values()) CHECK(std::abs(value - c / p.delta) < 1e-10);
}

TEST_CASE("solution residual is at round-off level") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 1000};
  const PolicyField u = PolicyField::constant(g, {0.4, 1.5});
  const auto sys = assemble(u, p, k, {20.0, 7.5});
  const auto v = solve_tridiagonal(sys);
  const auto r = residual(sys, v);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    rn += r[i] * r[i];
    bn += sys.rhs[i] * sys.rhs[i];
  }
  CHECK(std::sqrt(rn) < 1e-9 * std::sqrt(bn));
}

TEST_CASE("manufactured solution converges at first order") {
  const ModelParams p;
  const ManufacturedCheck m = manufactured_check(p, Grid{}, 500, 1000);
  CHECK(m.error_fine < m.error_coarse);
  CHECK(m.ratio >= 1.8);
  CHECK(m.pass);
}

TEST_CASE("interior rows are monotone (upwind M-matrix)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 300};
  PolicyField u = PolicyField::constant(g, {});
  for (std::size_t i = 0; i < g.n; ++i) {
    u.eta[i] = uc(rng);
    u.rho[i] = 3.0 * uc(rng);
  }
  const auto sys = assemble(u, p, k, {1.0, 1.0});
  for (std::size_t i = 1; i + 1 < g.n; ++i) {
    CHECK(sys.lower[i] >= 0.0);
    CHECK(sys.upper[i] >= 0.0);
    CHECK(sys.diag[i] < 0.0);
    CHECK(-sys.diag[i] >= sys.lower[i] + sys.upper[i] + p.delta - 1e-12 * std::abs(sys.diag[i]));
  }
}

TEST_CASE("discrete maximum principle with a flat right edge") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  const ModelParams p;
  const Grid g{0.01, 0.99, 200};
  const PolicyField u = PolicyField::constant(g, {0.5, 0.5});
  LinearCoefficients c = coefficients_for(u, p, CostParams{});
  for (double& s : c.source) s = 0.2 + uc(rng);
  const double lo = std::min(3.0, *std::min_element(c.source.begin(), c.source.end()) / p.delta);
  const double hi = std::max(3.0, *std::max_element(c.source.begin(), c.source.end()) / p.delta);
  const ValueField v = solve_bellman(g, c, {3.0, 0.0});
  for (double value : v.values()) {
    CHECK(value >= lo - 1e-9);
    CHECK(value <= hi + 1e-9);
  }
}

TEST_CASE("degenerate drift-only row falls back to the first-order edge") {
  ModelParams p;
  p.sigma = 0.0;
  const Grid g{0.01, 0.99, 50};
  const PolicyField u = PolicyField::constant(g, {1.0, 0.0});
  LinearCoefficients c = coefficients_for(u, p, CostParams{});
  // Strictly positive drift everywhere: interior rows couple only forward.
  for (double& b : c.drift) b = 0.3;
  const auto sys = assemble(g, c, {1.0, 0.0});
  CHECK(sys.lower[g.n - 1] == -1.0);
  CHECK(sys.diag[g.n - 1] == 1.0);
  CHECK_NOTHROW(solve_tridiagonal(sys));
}

TEST_CASE("value field gradient is exact for quadratics") {
  const Grid g{0.0 + 0.1, 0.9, 81};
  std::vector<double> vals;
  for (double x : g.nodes()) vals.push_back(3.0 * x * x - x + 2.0);
  const ValueField v(g, vals);
  const auto grad = v.gradient();
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(grad[i] == doctest::Approx(6.0 * g.node(i) - 1.0).epsilon(1e-9));
  }
  CHECK(v.curvature(40) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(v.interpolate(0.5) == doctest::Approx(3.0 * 0.25 - 0.5 + 2.0).epsilon(1e-3));
}
