#include "schwarz/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "schwarz/errors.hpp"

namespace schwarz {

namespace {

constexpr double kClampTolerance = 1e-12;

}  // namespace

BallPoint::BallPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  double s = 0.0;
  for (double c : coords_) s += c * c;
  norm_ = std::sqrt(s);
  if (!(norm_ < 1.0)) {
    throw OutOfBall("point has norm " + std::to_string(norm_) + ", must be < 1");
  }
}

BallPoint BallPoint::on_axis(double r, BallDim dim) {
  std::vector<double> c(dim.value(), 0.0);
  c.back() = r;
  return BallPoint(std::move(c));
}

void check_radius(double r) {
  if (!(r >= 0.0 && r < 1.0)) {
    throw InvalidRadius("radius must lie in [0, 1), got " + std::to_string(r));
  }
}

double poisson_kernel(const BallPoint& x, std::span<const double> zeta, BallDim dim) {
  const int n = dim.value();
  if (static_cast<int>(x.size()) != n || static_cast<int>(zeta.size()) != n) {
    throw InvalidArgument("point and boundary vector must have dimension n");
  }
  double zeta_norm2 = 0.0;
  double dist2 = 0.0;
  for (int i = 0; i < n; ++i) {
    zeta_norm2 += zeta[i] * zeta[i];
    const double d = x.coords()[i] - zeta[i];
    dist2 += d * d;
  }
  if (std::abs(std::sqrt(zeta_norm2) - 1.0) > 1e-12) {
    throw InvalidArgument("zeta must be a unit vector");
  }
  const double r = x.norm();
  return (1.0 - r) * (1.0 + r) * std::pow(dist2, -0.5 * n);
}

double axial_kernel(double r, double t, BallDim dim) {
  check_radius(r);
  if (!(t >= -1.0 && t <= 1.0)) {
    throw InvalidArgument("t must lie in [-1, 1], got " + std::to_string(t));
  }
  // 1 + r^2 - 2rt written so that neither end of [-1, 1] cancels.
  const double d = t >= 0.0 ? (1.0 - r) * (1.0 - r) + 2.0 * r * (1.0 - t)
                            : (1.0 + r) * (1.0 + r) - 2.0 * r * (1.0 + t);
  return (1.0 - r) * (1.0 + r) * std::pow(d, -0.5 * dim.value());
}

AxialKernelRange axial_kernel_range(double r, BallDim dim) {
  check_radius(r);
  const int n = dim.value();
  // (1 - r^2)/(1 -+ r)^n = (1 +- r)/(1 -+ r)^{n-1}
  return {(1.0 - r) * std::pow(1.0 + r, 1 - n), (1.0 + r) * std::pow(1.0 - r, 1 - n)};
}

std::optional<double> kernel_level_crossing(double r, double a, BallDim dim) {
  if (!(r > 0.0 && r < 1.0)) {
    throw InvalidRadius("level crossing needs r in (0, 1), got " + std::to_string(r));
  }
  if (!(a > 0.0)) throw InvalidArgument("level must be positive");
  const AxialKernelRange range = axial_kernel_range(r, dim);
  if (a < range.min_value * (1.0 - kClampTolerance) ||
      a > range.max_value * (1.0 + kClampTolerance)) {
    return std::nullopt;
  }
  const double d = std::pow((1.0 - r) * (1.0 + r) / a, 2.0 / dim.value());
  double t = (1.0 + r * r - d) / (2.0 * r);
  if (t > 1.0 - kClampTolerance) t = std::min(t, 1.0);
  if (t < -1.0 + kClampTolerance) t = std::max(t, -1.0);
  return std::clamp(t, -1.0, 1.0);
}

}  // namespace schwarz
