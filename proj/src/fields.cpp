#include "sisctl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisctl/error.hpp"

namespace sisctl {

void Grid::validate() const {
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && x_lo > 0.0 &&
        x_lo < x_hi && x_hi < 1.0)) {
    throw Error(ErrorKind::Validation, "0 < x_lo < x_hi < 1 required");
  }
  if (n < 3) throw Error(ErrorKind::Validation, "grid n >= 3 required");
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = node(i);
  return xs;
}

double interpolate_uniform(const Grid& grid, std::span<const double> samples,
                           double x) {
  if (x <= grid.x_lo) return samples.front();
  if (x >= grid.x_hi) return samples.back();
  const double s = (x - grid.x_lo) / grid.spacing();
  auto i = static_cast<std::size_t>(s);
  if (i >= grid.n - 1) i = grid.n - 2;
  const double w = s - static_cast<double>(i);
  return samples[i] + w * (samples[i + 1] - samples[i]);
}

PolicyField PolicyField::constant(const Grid& grid, ControlPair c) {
  return PolicyField{grid, std::vector<double>(grid.n, c.eta),
                     std::vector<double>(grid.n, c.rho)};
}

ControlPair PolicyField::interpolate(double x) const {
  return {std::clamp(interpolate_uniform(grid, eta, x), 0.0, 1.0),
          std::max(interpolate_uniform(grid, rho, x), 0.0)};
}

double PolicyField::max_rho() const {
  return rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
}

void PolicyField::validate(double rho_max) const {
  if (eta.size() != grid.n || rho.size() != grid.n) {
    throw Error(ErrorKind::Validation, "policy field size does not match grid");
  }
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (!(eta[i] >= 0.0 && eta[i] <= 1.0)) {
      throw Error(ErrorKind::Validation,
                  "eta in [0, 1] required at node " + std::to_string(i));
    }
    if (!(rho[i] >= 0.0 && rho[i] <= rho_max)) {
      throw Error(ErrorKind::Validation,
                  "rho in [0, rho_max] required at node " + std::to_string(i));
    }
  }
}

ValueField::ValueField(const Grid& grid, std::vector<double> values)
    : grid_(grid) {
  set_values(std::move(values));
}

void ValueField::set_values(std::vector<double> values) {
  if (values.size() != grid_.n) {
    throw Error(ErrorKind::Validation, "value field size does not match grid");
  }
  values_ = std::move(values);
  rebuild_gradient();
}

void ValueField::rebuild_gradient() {
  const std::size_t n = values_.size();
  const double h = grid_.spacing();
  const auto& v = values_;
  gradient_.assign(n, 0.0);
  gradient_[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    gradient_[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  }
  gradient_[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
}

double ValueField::curvature(std::size_t i) const {
  const double h = grid_.spacing();
  return (values_[i - 1] - 2.0 * values_[i] + values_[i + 1]) / (h * h);
}

double ValueField::interpolate(double x) const {
  return interpolate_uniform(grid_, values_, x);
}

double ValueField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace sisctl
