#pragma once

// Poisson kernel of the unit ball B^n,
//
//   P(x, zeta) = (1 - |x|^2) / |x - zeta|^n,
//
// and its axial form P_r(t) = P(rN, eta) with t = eta_n, N = (0, ..., 0, 1).

#include <optional>
#include <span>
#include <vector>

#include "schwarz/quadrature.hpp"

namespace schwarz {

// A point of the open unit ball.
class BallPoint {
 public:
  explicit BallPoint(std::vector<double> coords);
  // r * N in dimension n.
  static BallPoint on_axis(double r, BallDim dim);

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  double norm() const noexcept { return norm_; }

 private:
  std::vector<double> coords_;
  double norm_;
};

struct AxialKernelRange {
  double min_value;
  double max_value;
};

double poisson_kernel(const BallPoint& x, std::span<const double> zeta, BallDim dim);

double axial_kernel(double r, double t, BallDim dim);

// min is attained at t = -1, max at t = 1.
AxialKernelRange axial_kernel_range(double r, BallDim dim);

// Solves P_r(t*) = a. Empty when a lies outside the kernel range. Requires
// r in (0, 1).
std::optional<double> kernel_level_crossing(double r, double a, BallDim dim);

void check_radius(double r);

}  // namespace schwarz
