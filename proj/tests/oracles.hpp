#pragma once

// Reference computations that share no code with the library: tanh-sinh
// quadrature in the polar angle, moment recurrences, golden-section
// minimization and closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Tanh-sinh on [a, b]; tol bounds the change between refinement levels,
// so the error itself is far smaller for analytic pieces.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  static boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(f, a, b, tol);
}

// Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)) with tgamma directly.
inline double surface_ratio(int n) {
  return std::tgamma(0.5 * n) / (std::sqrt(kPi) * std::tgamma(0.5 * (n - 1)));
}

// sigma-integral of h(eta_n) as c_n \int_0^pi h(cos th) sin^{n-2}(th) dth,
// split at the angles of the given t values.
inline double sphere_integral(const std::function<double(double)>& h, int n,
                              std::vector<double> t_splits = {}, double tol = 1e-12) {
  std::vector<double> cuts{0.0, kPi};
  for (double t : t_splits) {
    if (t > -1.0 && t < 1.0) cuts.push_back(std::acos(t));
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    sum += integrate(
        [&](double th) { return h(std::cos(th)) * std::pow(std::sin(th), n - 2); }, cuts[i],
        cuts[i + 1], tol);
  }
  return surface_ratio(n) * sum;
}

inline double kernel(double r, double t, int n) {
  return (1.0 - r * r) / std::pow(1.0 + r * r - 2.0 * r * t, 0.5 * n);
}

// Splits a kernel integral at t* where P_r = a and, for large r, near the
// peak at t = 1.
inline std::vector<double> kernel_splits(double r, double a, int n) {
  std::vector<double> s;
  if (r > 0.0 && a > 0.0) {
    const double t = (1.0 + r * r - std::pow((1.0 - r * r) / a, 2.0 / n)) / (2.0 * r);
    if (t > -1.0 && t < 1.0) s.push_back(t);
  }
  for (double w : {0.5, 0.9, 0.99}) s.push_back(1.0 - w * (1.0 - r) * (1.0 - r));
  return s;
}

// (\int |P_r - a|^q dsigma)^{1/q}
inline double phi(double r, double a, double q, int n) {
  const double v = sphere_integral(
      [&](double t) { return std::pow(std::abs(kernel(r, t, n) - a), q); }, n,
      kernel_splits(r, a, n));
  return std::pow(v, 1.0 / q);
}

// Golden-section minimization on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double xtol = 1e-10) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol * std::max(1.0, std::abs(a))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// \int eta_n^{2k} dsigma on S^{n-1}: M_0 = 1, M_k = M_{k-1} (2k-1)/(2k-2+n).
inline double even_moment(int k, int n) {
  double m = 1.0;
  for (int j = 1; j <= k; ++j) m *= (2.0 * j - 1.0) / (2.0 * j - 2.0 + n);
  return m;
}

// U(rN) = sigma-mean of P_r sign(t) for n = 3 in closed form.
inline double u_axis_n3(double r) {
  return (1.0 - (1.0 - r * r) / std::sqrt(1.0 + r * r)) / r;
}

}  // namespace oracle
