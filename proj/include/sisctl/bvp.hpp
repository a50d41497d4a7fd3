#pragma once

// Finite-difference solve of the linear Bellman ODE under a fixed policy,
//
//   sigma(x)^2 v'' / 2 + b(x) v' - delta v + f(x) = 0   on [x_lo, x_hi],
//
// with v(x_lo) = dirichlet and v'(x_hi) = neumann.

#include <cstddef>
#include <span>
#include <vector>

#include "sisctl/fields.hpp"
#include "sisctl/model.hpp"

namespace sisctl {

struct BoundaryData {
  double dirichlet = 0.0;
  double neumann = 0.0;
};

// Row i reads lower[i] v[i-1] + diag[i] v[i] + upper[i] v[i+1] = rhs[i];
// lower[0] and upper[n-1] are unused and zero.
struct TridiagonalSystem {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> rhs;

  std::size_t size() const { return diag.size(); }
};

// Coefficients of the linear operator sampled at the grid nodes.
struct LinearCoefficients {
  std::vector<double> drift;      // b(x_i)
  std::vector<double> diffusion;  // sigma(x_i), not squared
  std::vector<double> source;     // f(x_i)
  double delta = 0.0;
};

LinearCoefficients coefficients_for(const PolicyField& policy,
                                    const ModelParams& p, const CostParams& k);

// Interior rows use first-order upwinding of the drift term (forward
// difference for b > 0, backward for b < 0, central when |b| h is
// negligible against sigma^2). Row 0 is the Dirichlet row. Row n-1 is the
// second-order one-sided Neumann stencil (3 v[n-1] - 4 v[n-2] + v[n-3]) / 2h,
// with v[n-3] eliminated against row n-2 so that the system stays
// tridiagonal; when row n-2 does not couple to v[n-3] (sigma = 0 with
// b >= 0) the first-order stencil is used instead.
TridiagonalSystem assemble(const Grid& grid, const LinearCoefficients& coeffs,
                           BoundaryData bc);
TridiagonalSystem assemble(const PolicyField& policy, const ModelParams& p,
                           const CostParams& k, BoundaryData bc);

// Thomas elimination. Throws SingularSystemError on a zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

// Row-wise residual A v - rhs.
std::vector<double> residual(const TridiagonalSystem& system,
                             std::span<const double> v);

ValueField solve_bellman(const Grid& grid, const LinearCoefficients& coeffs,
                         BoundaryData bc);
ValueField solve_bellman(const PolicyField& policy, const ModelParams& p,
                         const CostParams& k, BoundaryData bc);

}  // namespace sisctl
