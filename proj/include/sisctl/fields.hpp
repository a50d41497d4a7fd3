#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sisctl/model.hpp"

namespace sisctl {

// Uniform grid on [x_lo, x_hi] with n nodes.
struct Grid {
  double x_lo = 0.01;
  double x_hi = 0.99;
  std::size_t n = 1000;

  void validate() const;
  double spacing() const { return (x_hi - x_lo) / static_cast<double>(n - 1); }
  double node(std::size_t i) const {
    return i + 1 == n ? x_hi : x_lo + static_cast<double>(i) * spacing();
  }
  std::vector<double> nodes() const;
};

// Grid-sampled control pair. Between nodes the policy is read by linear
// interpolation of each component; outside [x_lo, x_hi] the edge value holds.
struct PolicyField {
  Grid grid;
  std::vector<double> eta;
  std::vector<double> rho;

  static PolicyField constant(const Grid& grid, ControlPair c);

  ControlPair at(std::size_t i) const { return {eta[i], rho[i]}; }
  ControlPair interpolate(double x) const;
  double max_rho() const;

  // Throws Error(Validation) unless sizes match the grid and every sample
  // lies in [0, 1] x [0, rho_max].
  void validate(double rho_max) const;
};

// Grid-sampled value function. The gradient is rebuilt whenever the values
// are replaced: central differences inside, second-order one-sided
// differences at both edges.
class ValueField {
 public:
  ValueField() = default;
  ValueField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> gradient() const { return gradient_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  void set_values(std::vector<double> values);

  // Central second difference at an interior node.
  double curvature(std::size_t i) const;
  double interpolate(double x) const;
  double max_abs() const;

 private:
  void rebuild_gradient();

  Grid grid_;
  std::vector<double> values_;
  std::vector<double> gradient_;
};

// Piecewise-linear interpolation of samples on a uniform grid, clamped to the
// edge samples outside the grid.
double interpolate_uniform(const Grid& grid, std::span<const double> samples,
                           double x);

}  // namespace sisctl
