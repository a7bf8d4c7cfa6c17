#include "schwarz/schwarz_bound.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "schwarz/errors.hpp"

namespace schwarz {

namespace {

constexpr double kBracketInflation = 1e-9;
constexpr std::uintmax_t kMaxRootIterations = 200;

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void check_solver_radius(double r, const SolverOptions& opts) {
  check_radius(r);
  if (r >= kNearBoundaryRadius && opts.nodes < kNearBoundaryNodes) {
    throw NearBoundary("r=" + fmt_real(r) + " is too close to the boundary for " +
                       std::to_string(opts.nodes) + " nodes; use at least " +
                       std::to_string(kNearBoundaryNodes));
  }
}

const SphereQuadrature& quadrature(BallDim dim, const SolverOptions& opts) {
  return SphereQuadrature::shared(dim, opts.nodes);
}

// Kink of |P_r - a| if the level a is attained.
std::vector<double> crossing_split(double r, double a, BallDim dim) {
  if (!(a > 0.0)) return {};
  if (auto t = kernel_level_crossing(r, a, dim)) return {*t};
  return {};
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Exponent Exponent::finite(double value) {
  if (!(value >= 1.0) || !std::isfinite(value)) {
    throw InvalidExponent("p must be ≥ 1, got " + fmt_real(value));
  }
  Exponent e;
  e.infinite_ = false;
  e.value_ = value;
  return e;
}

std::string Exponent::to_string() const { return infinite_ ? "inf" : fmt_real(value_); }

Exponent parse_exponent(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "infinity") return Exponent::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw InvalidExponent("cannot parse exponent '" + text + "'");
  }
  if (!(v >= 1.0)) throw InvalidExponent("p must be ≥ 1, got " + text);
  if (std::isinf(v)) return Exponent::infinity();
  return Exponent::finite(v);
}

ExponentPair conjugate(Exponent p) {
  if (p.is_infinite()) return {p, Exponent::finite(1.0)};
  if (p.value() == 1.0) return {p, Exponent::infinity()};
  return {p, Exponent::finite(p.value() / (p.value() - 1.0))};
}

ExponentPair conjugate(double p) {
  if (std::isinf(p) && p > 0.0) return conjugate(Exponent::infinity());
  return conjugate(Exponent::finite(p));
}

double phi(double r, double a, const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  check_solver_radius(r, opts);
  if (!(a >= 0.0)) throw InvalidArgument("shift a must be >= 0");
  if (r == 0.0) return std::abs(1.0 - a);
  if (ex.q.is_infinite()) {
    const AxialKernelRange range = axial_kernel_range(r, dim);
    return std::max(std::abs(range.max_value - a), std::abs(a - range.min_value));
  }
  const double q = ex.q.value();
  const auto splits = crossing_split(r, a, dim);
  const double integral = quadrature(dim, opts).integrate(
      [&](double t) { return std::pow(std::abs(axial_kernel(r, t, dim) - a), q); }, splits, r);
  return std::pow(integral, 1.0 / q);
}

double balance_F(double r, double a, const ExponentPair& ex, BallDim dim,
                 const SolverOptions& opts) {
  check_solver_radius(r, opts);
  if (ex.q.is_infinite()) throw InvalidExponent("balance function needs q < inf (p > 1)");
  if (!(a > 0.0)) throw InvalidArgument("shift a must be > 0");
  const double q = ex.q.value();
  if (r == 0.0) {
    const double d = 1.0 - a;
    return q == 1.0 ? sign_of(d) : sign_of(d) * std::pow(std::abs(d), q - 1.0);
  }
  const auto splits = crossing_split(r, a, dim);
  const auto& quad = quadrature(dim, opts);
  if (q == 1.0) {
    // sigma{P_r > a} - sigma{P_r < a}
    return quad.integrate([&](double t) { return sign_of(axial_kernel(r, t, dim) - a); },
                          splits, r);
  }
  return quad.integrate(
      [&](double t) {
        const double d = axial_kernel(r, t, dim) - a;
        return sign_of(d) * std::pow(std::abs(d), q - 1.0);
      },
      splits, r);
}

double a_star(double r, const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  check_solver_radius(r, opts);
  if (r == 0.0) return 1.0;
  const int n = dim.value();
  if (!ex.q.is_infinite() && ex.q.value() == 1.0) {
    return (1.0 - r) * (1.0 + r) * std::pow(1.0 + r * r, -0.5 * n);
  }
  const AxialKernelRange range = axial_kernel_range(r, dim);
  if (ex.q.is_infinite()) return 0.5 * (range.max_value + range.min_value);

  const double lo = range.min_value * (1.0 - kBracketInflation);
  const double hi = range.max_value * (1.0 + kBracketInflation);
  auto f = [&](double a) { return balance_F(r, a, ex, dim, opts); };
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw BracketFailure("balance function does not change sign on [" + fmt_real(lo) + ", " +
                         fmt_real(hi) + "] at r=" + fmt_real(r) + ": F(lo)=" + fmt_real(f_lo) +
                         ", F(hi)=" + fmt_real(f_hi));
  }
  const double tol = opts.root_rel_tol;
  auto converged = [tol](double a, double b) {
    return std::abs(b - a) <= tol * std::min(std::abs(a), std::abs(b));
  };
  std::uintmax_t iterations = kMaxRootIterations;
  const auto [left, right] =
      boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, converged, iterations);
  if (iterations >= kMaxRootIterations) {
    throw NonConvergence("root finder for a*(r) did not converge at r=" + fmt_real(r));
  }
  return 0.5 * (left + right);
}

BoundPoint bound_point(double r, const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  check_solver_radius(r, opts);
  if (r == 0.0) return {0.0, 1.0, 0.0};
  if (ex.q.is_infinite()) {
    const AxialKernelRange range = axial_kernel_range(r, dim);
    return {r, 0.5 * (range.max_value + range.min_value),
            0.5 * (range.max_value - range.min_value)};
  }
  const double a = a_star(r, ex, dim, opts);
  return {r, a, phi(r, a, ex, dim, opts)};
}

double g_p(double r, const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  return bound_point(r, ex, dim, opts).g_value;
}

double closed_form_g(ClosedFormCase which, double r, BallDim dim, const SolverOptions& opts) {
  check_solver_radius(r, opts);
  const int n = dim.value();
  switch (which) {
    case ClosedFormCase::p2:
      // (1 + r^2)/(1 - r^2)^{n-1} - 1 without cancellation at small r.
      return std::sqrt(std::expm1(std::log1p(r * r) - (n - 1) * std::log1p(-r * r)));
    case ClosedFormCase::p1:
      return 0.5 * ((1.0 + r) * std::pow(1.0 - r, 1 - n) - (1.0 - r) * std::pow(1.0 + r, 1 - n));
    case ClosedFormCase::pinf: {
      if (r == 0.0) return 0.0;
      // U(rN) = \int P_r (chi_{S+} - chi_{S-}) dsigma
      const double split[1] = {0.0};
      return quadrature(dim, opts).integrate(
          [&](double t) { return sign_of(t) * axial_kernel(r, t, dim); }, split, r);
    }
  }
  return 0.0;
}

BoundCurve g_curve(const ExponentPair& ex, BallDim dim, const std::vector<double>& r_grid,
                   const SolverOptions& opts) {
  BoundCurve curve{ex, dim, {}};
  curve.points.reserve(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    if (i > 0 && !(r > r_grid[i - 1])) {
      throw InvalidArgument("radius grid must be strictly increasing");
    }
    try {
      curve.points.push_back(bound_point(r, ex, dim, opts));
    } catch (const UsageError& e) {
      throw UsageError("r=" + fmt_real(r) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("r=" + fmt_real(r) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (!(curve.points[i].g_value > curve.points[i - 1].g_value)) {
      throw Inconsistency("g_p not strictly increasing between r=" +
                          fmt_real(curve.points[i - 1].r) + " and r=" +
                          fmt_real(curve.points[i].r));
    }
  }
  return curve;
}

bool gradient_constant_is_limit(const ExponentPair& ex) { return ex.q.is_infinite(); }

double sharp_gradient_constant(const ExponentPair& ex, BallDim dim) {
  const double n = dim.value();
  if (ex.q.is_infinite()) return n;
  const double q = ex.q.value();
  const double log_moment = std::lgamma(0.5 * n) + std::lgamma(0.5 * (1.0 + q)) -
                            0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * (n + q));
  return n * std::exp(log_moment / q);
}

double g_prime_at_zero(const ExponentPair& ex, BallDim dim, const SolverOptions& opts) {
  const double n = dim.value();
  if (ex.q.is_infinite()) return n;
  const double q = ex.q.value();
  const double split[1] = {0.0};
  const double moment =
      quadrature(dim, opts).integrate([q](double t) { return std::pow(std::abs(t), q); }, split);
  return n * std::pow(moment, 1.0 / q);
}

namespace {

constexpr int kTablePanels = 32;
constexpr int kTableNodes = 17;

// Chebyshev points of the second kind on [lo, hi], ascending.
double cheb_point(double lo, double hi, int j) {
  const double x = -std::cos(std::numbers::pi * j / (kTableNodes - 1));
  return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
}

double barycentric(const double* values, double lo, double hi, double r) {
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < kTableNodes; ++j) {
    const double xj = cheb_point(lo, hi, j);
    const double diff = r - xj;
    if (diff == 0.0) return values[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == kTableNodes - 1) w *= 0.5;
    w /= diff;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

}  // namespace

BoundTable::BoundTable(const ExponentPair& ex, BallDim dim, double r_max,
                       const SolverOptions& opts)
    : ex_(ex), dim_(dim), r_max_(r_max) {
  check_solver_radius(r_max, opts);
  if (!(r_max > 0.0)) throw InvalidRadius("table radius must be positive");
  values_.resize(static_cast<std::size_t>(kTablePanels) * kTableNodes);
  const double width = r_max / kTablePanels;
  for (int k = 0; k < kTablePanels; ++k) {
    const double lo = k * width;
    const double hi = k + 1 == kTablePanels ? r_max : (k + 1) * width;
    for (int j = 0; j < kTableNodes; ++j) {
      values_[static_cast<std::size_t>(k) * kTableNodes + j] =
          g_p(cheb_point(lo, hi, j), ex, dim, opts);
    }
    // Midpoints of the first, middle and last node gaps.
    for (int j : {0, kTableNodes / 2, kTableNodes - 2}) {
      const double mid = 0.5 * (cheb_point(lo, hi, j) + cheb_point(lo, hi, j + 1));
      const double direct = g_p(mid, ex, dim, opts);
      const double interp = (*this)(mid);
      const double err = std::abs(interp - direct) / std::max(direct, 1e-300);
      validation_error_ = std::max(validation_error_, err);
    }
  }
  if (validation_error_ > kBoundTableTolerance) {
    throw Inconsistency("g_p table interpolation error " + fmt_real(validation_error_) +
                        " exceeds " + fmt_real(kBoundTableTolerance));
  }
}

double BoundTable::operator()(double r) const {
  if (!(r >= 0.0 && r <= r_max_)) {
    throw InvalidRadius("r=" + fmt_real(r) + " outside the table range [0, " + fmt_real(r_max_) +
                        "]");
  }
  const double width = r_max_ / kTablePanels;
  const int k = std::min(kTablePanels - 1, static_cast<int>(r / width));
  const double lo = k * width;
  const double hi = k + 1 == kTablePanels ? r_max_ : (k + 1) * width;
  return barycentric(values_.data() + static_cast<std::size_t>(k) * kTableNodes, lo, hi, r);
}

double schwarz_bound(const BallPoint& x, const ExponentPair& ex, BallDim dim, double norm,
                     const SolverOptions& opts) {
  if (static_cast<int>(x.size()) != dim.value()) {
    throw InvalidArgument("point dimension does not match n");
  }
  if (!(norm > 0.0)) throw InvalidArgument("norm must be positive");
  return g_p(x.norm(), ex, dim, opts) * norm;
}

}  // namespace schwarz
