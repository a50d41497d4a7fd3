#include "sisctl/bvp.hpp"

#include <cmath>
#include <string>

#include "sisctl/error.hpp"

namespace sisctl {

LinearCoefficients coefficients_for(const PolicyField& policy,
                                    const ModelParams& p,
                                    const CostParams& k) {
  const Grid& grid = policy.grid;
  LinearCoefficients out;
  out.drift.resize(grid.n);
  out.diffusion.resize(grid.n);
  out.source.resize(grid.n);
  out.delta = p.delta;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    out.drift[i] = drift(x, policy.at(i), p);
    out.diffusion[i] = diffusion(x, p);
    out.source[i] = running_cost(x, policy.at(i), k);
  }
  return out;
}

TridiagonalSystem assemble(const Grid& grid, const LinearCoefficients& coeffs,
                           BoundaryData bc) {
  const std::size_t n = grid.n;
  if (coeffs.drift.size() != n || coeffs.diffusion.size() != n ||
      coeffs.source.size() != n) {
    throw Error(ErrorKind::Validation, "coefficient size does not match grid");
  }
  const double h = grid.spacing();
  TridiagonalSystem sys{std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0)};

  sys.diag[0] = 1.0;
  sys.rhs[0] = bc.dirichlet;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s2 = coeffs.diffusion[i] * coeffs.diffusion[i];
    const double b = coeffs.drift[i];
    const double d = 0.5 * s2 / (h * h);
    double lo = d;
    double up = d;
    double di = -2.0 * d - coeffs.delta;
    if (std::abs(b) * h < 1e-12 * s2) {
      lo -= b / (2.0 * h);
      up += b / (2.0 * h);
    } else if (b > 0.0) {
      up += b / h;
      di -= b / h;
    } else {
      lo -= b / h;
      di += b / h;
    }
    if (di == 0.0) {
      throw Error(ErrorKind::Singular,
                  "assemble: zero diagonal at row " + std::to_string(i));
    }
    sys.lower[i] = lo;
    sys.diag[i] = di;
    sys.upper[i] = up;
    sys.rhs[i] = -coeffs.source[i];
  }

  // Neumann row, scaled by 2h: v[n-3] - 4 v[n-2] + 3 v[n-1] = 2 h g.
  const std::size_t last = n - 1;
  const double l = n > 3 ? sys.lower[last - 1] : 0.0;
  if (n > 3 && l != 0.0) {
    sys.lower[last] = -4.0 - sys.diag[last - 1] / l;
    sys.diag[last] = 3.0 - sys.upper[last - 1] / l;
    sys.rhs[last] = 2.0 * h * bc.neumann - sys.rhs[last - 1] / l;
  } else {
    sys.lower[last] = -1.0;
    sys.diag[last] = 1.0;
    sys.rhs[last] = h * bc.neumann;
  }
  return sys;
}

TridiagonalSystem assemble(const PolicyField& policy, const ModelParams& p,
                           const CostParams& k, BoundaryData bc) {
  return assemble(policy.grid, coefficients_for(policy, p, k), bc);
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
  const std::size_t n = system.size();
  std::vector<double> c_prime(n, 0.0);
  std::vector<double> x(n, 0.0);

  double pivot = system.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) {
    throw SingularSystemError(0, "solve_tridiagonal: singular pivot at row 0");
  }
  c_prime[0] = system.upper[0] / pivot;
  x[0] = system.rhs[0] / pivot;

  // Forward sweep
  for (std::size_t i = 1; i < n; ++i) {
    pivot = system.diag[i] - system.lower[i] * c_prime[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw SingularSystemError(
          i, "solve_tridiagonal: singular pivot at row " + std::to_string(i));
    }
    c_prime[i] = system.upper[i] / pivot;
    x[i] = (system.rhs[i] - system.lower[i] * x[i - 1]) / pivot;
  }

  // Back substitution
  for (std::size_t i = n - 1; i > 0; --i) {
    x[i - 1] -= c_prime[i - 1] * x[i];
  }
  return x;
}

std::vector<double> residual(const TridiagonalSystem& system,
                             std::span<const double> v) {
  const std::size_t n = system.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = system.diag[i] * v[i] - system.rhs[i];
    if (i > 0) acc += system.lower[i] * v[i - 1];
    if (i + 1 < n) acc += system.upper[i] * v[i + 1];
    r[i] = acc;
  }
  return r;
}

ValueField solve_bellman(const Grid& grid, const LinearCoefficients& coeffs,
                         BoundaryData bc) {
  grid.validate();
  return ValueField(grid, solve_tridiagonal(assemble(grid, coeffs, bc)));
}

ValueField solve_bellman(const PolicyField& policy, const ModelParams& p,
                         const CostParams& k, BoundaryData bc) {
  return solve_bellman(policy.grid, coefficients_for(policy, p, k), bc);
}

}  // namespace sisctl
