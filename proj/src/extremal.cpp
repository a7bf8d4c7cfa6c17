#include "schwarz/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "schwarz/errors.hpp"
#include "schwarz/kernel.hpp"

namespace schwarz {

namespace {

constexpr int kSupGridPoints = 4097;
constexpr double kKinkOffset = 1e-12;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_open_radius(double R) {
  if (!(R > 0.0 && R < 1.0)) {
    throw InvalidRadius("R must lie in (0, 1), got " + std::to_string(R));
  }
}

void require_p_above_one(const ExponentPair& ex) {
  if (ex.q.is_infinite()) {
    throw InvalidExponent("extremal data needs p > 1; p = 1 sharpness is only approached as p -> 1");
  }
}

}  // namespace

ZonalProfile extremal_boundary(double R, const ExponentPair& ex, BallDim dim,
                               const SolverOptions& opts) {
  check_open_radius(R);
  require_p_above_one(ex);
  const double a = a_star(R, ex, dim, opts);
  std::vector<double> kinks;
  if (auto t = kernel_level_crossing(R, a, dim)) kinks.push_back(*t);
  // q/p = q - 1 by conjugacy; zero for p = inf gives the sign profile.
  const double power = ex.q.value() - 1.0;
  ZonalProfile f;
  f.known_kinks = std::move(kinks);
  f.focus = R;
  if (power == 0.0) {
    f.eval = [R, a, dim](double t) { return sign_of(axial_kernel(R, t, dim) - a); };
  } else {
    f.eval = [R, a, dim, power](double t) {
      const double d = axial_kernel(R, t, dim) - a;
      return sign_of(d) * std::pow(std::abs(d), power);
    };
  }
  return f;
}

double poisson_extend_axial(const ZonalProfile& f, double r, BallDim dim,
                            const SolverOptions& opts) {
  check_radius(r);
  const auto& quad = SphereQuadrature::shared(dim, opts.nodes);
  if (r == 0.0) return quad.integrate(f);
  ZonalProfile product{[&](double t) { return axial_kernel(r, t, dim) * f(t); }, f.known_kinks,
                       f.focus};
  return quad.integrate(product, {}, r);
}

double hp_norm_zonal(const ZonalProfile& f, const ExponentPair& ex, BallDim dim,
                     const SolverOptions& opts) {
  if (ex.p.is_infinite()) {
    double sup = std::max(std::abs(f(-1.0)), std::abs(f(1.0)));
    for (int i = 0; i < kSupGridPoints; ++i) {
      const double t = -1.0 + 2.0 * i / (kSupGridPoints - 1);
      sup = std::max(sup, std::abs(f(t)));
    }
    for (double k : f.known_kinks) {
      for (double t : {k - kKinkOffset, k, k + kKinkOffset}) {
        if (t >= -1.0 && t <= 1.0) sup = std::max(sup, std::abs(f(t)));
      }
    }
    return sup;
  }
  const double p = ex.p.value();
  ZonalProfile power{[&](double t) { return std::pow(std::abs(f(t)), p); }, f.known_kinks,
                     f.focus};
  const double integral = SphereQuadrature::shared(dim, opts.nodes).integrate(power);
  return std::pow(integral, 1.0 / p);
}

SharpnessReport sharpness_report(double R, const ExponentPair& ex, BallDim dim,
                                 const SolverOptions& opts) {
  check_open_radius(R);
  const ZonalProfile f = extremal_boundary(R, ex, dim, opts);
  SharpnessReport rep{R, ex, dim, 0.0, 0.0, 0.0, 0.0, 0.0};
  rep.lhs = poisson_extend_axial(f, R, dim, opts);
  rep.norm = hp_norm_zonal(f, ex, dim, opts);
  rep.bound = g_p(R, ex, dim, opts);
  rep.origin_value = poisson_extend_axial(f, 0.0, dim, opts);
  rep.ratio = rep.lhs / (rep.norm * rep.bound);
  if (rep.ratio > 1.0 + kSharpnessTolerance) {
    throw Inconsistency("sharpness ratio " + std::to_string(rep.ratio) +
                        " exceeds 1 at R=" + std::to_string(R));
  }
  return rep;
}

double gradient_extremal_check(const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  require_p_above_one(ex);
  const double power = ex.q.value() - 1.0;
  ZonalProfile f;
  f.known_kinks = {0.0};
  f.eval = [power](double t) {
    return power == 0.0 ? sign_of(t) : sign_of(t) * std::pow(std::abs(t), power);
  };
  // Du(0) = n \int eta f(eta) dsigma; only the last component survives.
  const double n = dim.value();
  const ZonalProfile moment{[&](double t) { return t * f(t); }, f.known_kinks, 0.0};
  const double derivative =
      n * SphereQuadrature::shared(dim, opts.nodes).integrate(moment);
  return std::abs(derivative) / hp_norm_zonal(f, ex, dim, opts);
}

}  // namespace schwarz
