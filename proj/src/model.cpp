#include "sisctl/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "sisctl/error.hpp"

namespace sisctl {
namespace {

constexpr int kEtaScanPoints = 401;

void require_state(double x, const char* where) {
  if (!(x > 0.0 && x < 1.0)) {
    throw Error(ErrorKind::Domain, std::string(where) + ": state x=" +
                                       std::to_string(x) +
                                       " outside (0, 1)");
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Validation, message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double management_weight(double x, const CostParams& k) {
  return k.amS + (k.amI - k.amS) * x;
}

double clamp_rho(double rho, double rho_max) {
  return std::clamp(rho, 0.0, rho_max);
}

// rho branch shared by both modes: only a positive gradient buys mitigation.
double mitigation(double dv, double denom, double rho_max) {
  if (!(dv > 0.0)) return 0.0;
  if (denom <= 0.0) return rho_max;
  return clamp_rho(dv / denom, rho_max);
}

// Minimizes q(eta) = a eta^2 + b eta + c on [0, 1] by scanning a uniform grid.
double scan_eta(double a, double b) {
  double best_eta = 0.0;
  double best = 0.0;
  for (int i = 0; i < kEtaScanPoints; ++i) {
    const double eta = static_cast<double>(i) / (kEtaScanPoints - 1);
    const double q = (a * eta + b) * eta;
    if (i == 0 || q < best) {
      best = q;
      best_eta = eta;
    }
  }
  return best_eta;
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha >= 0 required");
  require(std::isfinite(beta) && beta >= 0.0, "beta >= 0 required");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma >= 0 required");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma >= 0 required");
  require(std::isfinite(delta) && delta > 0.0, "delta > 0 required");
}

void CostParams::validate() const {
  require(finite_nonneg(a0), "a0 >= 0 required");
  require(finite_nonneg(aI), "aI >= 0 required");
  require(finite_nonneg(amS), "amS >= 0 required");
  require(finite_nonneg(amI), "amI >= 0 required");
  require(finite_nonneg(ar), "ar >= 0 required");
  require(amI >= amS, "amI >= amS required");
}

bool CostParams::satisfies_standing_assumption() const {
  return amI > amS && amS > 0.0 && ar > 0.0;
}

const char* to_string(UpdateMode mode) {
  return mode == UpdateMode::AsPrinted ? "as_printed" : "exact_foc";
}

UpdateMode update_mode_from_string(const char* name) {
  if (std::strcmp(name, "as_printed") == 0) return UpdateMode::AsPrinted;
  if (std::strcmp(name, "exact_foc") == 0) return UpdateMode::ExactFoc;
  throw Error(ErrorKind::Validation,
              std::string("unknown update mode '") + name +
                  "' (expected as_printed or exact_foc)");
}

double drift(double x, ControlPair c, const ModelParams& p) {
  require_state(x, "drift");
  return c.eta * p.alpha * (1.0 - x) +
         x * (c.eta * c.eta * p.beta * (1.0 - x) - (p.gamma + c.rho));
}

double diffusion(double x, const ModelParams& p) {
  require_state(x, "diffusion");
  return p.sigma * x * (1.0 - x);
}

double running_cost(double x, ControlPair c, const CostParams& k) {
  require_state(x, "running_cost");
  const double gap = (1.0 - c.eta) * (1.0 - c.eta);
  return k.a0 + k.aI * x + k.amS * gap + (k.amI - k.amS) * x * gap +
         k.ar * x * c.rho * c.rho;
}

ControlPair update_controls(double x, double dv, const ModelParams& p,
                            const CostParams& k, UpdateMode mode,
                            double rho_max) {
  require_state(x, "update_controls");
  if (!std::isfinite(dv)) {
    throw Error(ErrorKind::Domain, "update_controls: non-finite gradient");
  }
  if (dv == 0.0) return {1.0, 0.0};

  const double c = management_weight(x, k);
  ControlPair out;
  if (mode == UpdateMode::AsPrinted) {
    const double push = (p.alpha + p.beta * x) * (1.0 - x) * dv;
    double raw;
    if (c > 0.0) {
      raw = 1.0 - push / (2.0 * c);
    } else {
      raw = push > 0.0 ? 0.0 : 1.0;
    }
    out.eta = std::clamp(raw, 0.0, 1.0);
    out.rho = mitigation(dv, 2.0 * k.ar * x, rho_max);
    return out;
  }

  // q(eta) = quad eta^2 + lin eta + c is the eta-dependent part of b dv + f.
  const double quad = c + p.beta * x * (1.0 - x) * dv;
  const double lin = p.alpha * (1.0 - x) * dv - 2.0 * c;
  if (quad > 0.0) {
    out.eta = std::clamp(-lin / (2.0 * quad), 0.0, 1.0);
  } else {
    out.eta = scan_eta(quad, lin);
  }
  out.rho = mitigation(dv, 2.0 * k.ar, rho_max);
  return out;
}

double hamiltonian(double x, ControlPair c, double v, double dv, double d2v,
                   const ModelParams& p, const CostParams& k) {
  const double s = diffusion(x, p);
  return drift(x, c, p) * dv + 0.5 * s * s * d2v - p.delta * v +
         running_cost(x, c, k);
}

double hamiltonian_min(double x, double v, double dv, double d2v,
                       const ModelParams& p, const CostParams& k,
                       double rho_max) {
  const ControlPair best =
      update_controls(x, dv, p, k, UpdateMode::ExactFoc, rho_max);
  return hamiltonian(x, best, v, dv, d2v, p, k);
}

double lipschitz_constant(ControlPair c, const ModelParams& p) {
  const double e2b = c.eta * c.eta * p.beta;
  return std::max(
      std::abs(e2b - c.eta * p.alpha - (p.gamma + c.rho)) + 2.0 * e2b,
      3.0 * p.sigma);
}

double running_cost_bound(const CostParams& k, double rho_cap) {
  // f is affine in x for fixed controls, (1 - eta)^2 <= 1 and the management
  // weight is non-negative, so the supremum sits at eta = 0 and x in {0, 1}.
  const double at_zero = k.a0 + k.amS;
  const double at_one = k.a0 + k.aI + k.amI + k.ar * rho_cap * rho_cap;
  return std::max(at_zero, at_one);
}

}  // namespace sisctl
