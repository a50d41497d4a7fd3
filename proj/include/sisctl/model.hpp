#pragma once

// Closed-form kernels of the controlled SIS diffusion
//
//   dX = b(X, eta, rho) dt + sigma X (1 - X) dW,
//   b(x, eta, rho) = eta alpha (1 - x) + x [eta^2 beta (1 - x) - (gamma + rho)],
//
// with running cost
//
//   f = a0 + aI x + amS (1 - eta)^2 + (amI - amS) x (1 - eta)^2 + ar x rho^2.
//
// Every function here is pure and reentrant.

namespace sisctl {

struct ModelParams {
  double alpha = 0.5;   // external attack rate
  double beta = 0.5;    // internal contagion rate
  double gamma = 0.15;  // baseline recovery rate
  double sigma = 0.3;   // volatility
  double delta = 0.05;  // discount rate

  // Throws Error(Validation) naming the violated invariant.
  void validate() const;
};

struct CostParams {
  double a0 = 0.5;   // baseline running cost
  double aI = 5.0;   // infection marginal cost
  double amS = 0.5;  // management cost, susceptible nodes
  double amI = 2.5;  // management cost, infected nodes
  double ar = 5.0;   // mitigation marginal cost

  // Requires finite, non-negative coefficients with amI >= amS. The strict
  // ordering amI > amS > 0, ar > 0 is reported separately so that
  // degenerate constant-cost configurations remain solvable.
  void validate() const;
  bool satisfies_standing_assumption() const;
};

inline constexpr double kDefaultRhoMax = 10.0;

struct ControlPair {
  double eta = 1.0;  // management control in [0, 1]; 1 means no protection
  double rho = 0.0;  // mitigation control in [0, rho_max]
};

enum class UpdateMode {
  AsPrinted,  // the first-order-condition formulas exactly as written
  ExactFoc,   // the true pointwise minimizer of b * dv + f
};

const char* to_string(UpdateMode mode);
UpdateMode update_mode_from_string(const char* name);

// All kernels throw Error(Domain) when x is not in (0, 1).
double drift(double x, ControlPair c, const ModelParams& p);
double diffusion(double x, const ModelParams& p);
double running_cost(double x, ControlPair c, const CostParams& k);

// Control update from a value-gradient sample. Both modes return
// eta in [0, 1] and rho in [0, rho_max].
ControlPair update_controls(double x, double dv, const ModelParams& p,
                            const CostParams& k, UpdateMode mode,
                            double rho_max = kDefaultRhoMax);

// b dv + sigma(x)^2 d2v / 2 - delta v + f at a fixed control.
double hamiltonian(double x, ControlPair c, double v, double dv, double d2v,
                   const ModelParams& p, const CostParams& k);

// Infimum of hamiltonian() over [0, 1] x [0, rho_max].
double hamiltonian_min(double x, double v, double dv, double d2v,
                       const ModelParams& p, const CostParams& k,
                       double rho_max = kDefaultRhoMax);

// Lipschitz constant of x -> b(x, c) and x -> sigma(x) on (0, 1) for a fixed
// control: max(|eta^2 beta - eta alpha - (gamma + rho)| + 2 eta^2 beta, 3 sigma).
double lipschitz_constant(ControlPair c, const ModelParams& p);

// Supremum of f over x in [0, 1], eta in [0, 1], rho in [0, rho_cap].
double running_cost_bound(const CostParams& k, double rho_cap);

}  // namespace sisctl
