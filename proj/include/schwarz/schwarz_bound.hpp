#pragma once

// The sharp Schwarz bound for harmonic maps f of B^n with f(0) = 0:
//
//   |f(x)| <= g_p(|x|) ||f||_p,
//   g_p(r) = min_{a >= 0} Phi_r(a),  Phi_r(a) = || P_r - a ||_{L^q(sigma)},
//
// with q the Holder conjugate of p. The minimizer a*(r) is the zero of the
// balance function F(r, a) = \int (P_r - a)|P_r - a|^{q-2} dsigma.

#include <string>
#include <vector>

#include "schwarz/kernel.hpp"
#include "schwarz/quadrature.hpp"

namespace schwarz {

// An exponent in [1, inf] with an explicit infinity tag.
class Exponent {
 public:
  static Exponent finite(double value);
  static Exponent infinity() { return Exponent(); }

  bool is_infinite() const noexcept { return infinite_; }
  // Only meaningful for finite exponents.
  double value() const noexcept { return value_; }
  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

// Parses a real >= 1 or "inf" (any case).
Exponent parse_exponent(const std::string& text);

struct ExponentPair {
  Exponent p;
  Exponent q;
};

ExponentPair conjugate(Exponent p);
ExponentPair conjugate(double p);

struct SolverOptions {
  int nodes = kDefaultNodeCount;
  double root_rel_tol = 1e-12;
};

// Radii at or beyond this need at least kNearBoundaryNodes nodes.
inline constexpr double kNearBoundaryRadius = 0.999;
inline constexpr int kNearBoundaryNodes = 256;

struct BoundPoint {
  double r;
  double a_star;
  double g_value;
};

struct BoundCurve {
  ExponentPair exponents;
  BallDim dim;
  std::vector<BoundPoint> points;
};

enum class ClosedFormCase { p1, p2, pinf };

double phi(double r, double a, const ExponentPair& ex, BallDim dim,
           const SolverOptions& opts = {});

double balance_F(double r, double a, const ExponentPair& ex, BallDim dim,
                 const SolverOptions& opts = {});

double a_star(double r, const ExponentPair& ex, BallDim dim, const SolverOptions& opts = {});

BoundPoint bound_point(double r, const ExponentPair& ex, BallDim dim,
                       const SolverOptions& opts = {});

double g_p(double r, const ExponentPair& ex, BallDim dim, const SolverOptions& opts = {});

double closed_form_g(ClosedFormCase which, double r, BallDim dim, const SolverOptions& opts = {});

// Throws with the offending r when any point fails, or Inconsistency when the
// computed values are not strictly increasing.
BoundCurve g_curve(const ExponentPair& ex, BallDim dim, const std::vector<double>& r_grid,
                   const SolverOptions& opts = {});

// n (Gamma(n/2) Gamma((1+q)/2) / (sqrt(pi) Gamma((n+q)/2)))^{1/q}; for p = 1 the
// q -> inf limit n.
double sharp_gradient_constant(const ExponentPair& ex, BallDim dim);
bool gradient_constant_is_limit(const ExponentPair& ex);

// (\int |n eta_n|^q dsigma)^{1/q} by quadrature.
double g_prime_at_zero(const ExponentPair& ex, BallDim dim, const SolverOptions& opts = {});

// g_p on [0, r_max] as piecewise Chebyshev interpolants, for callers that
// need many evaluations. Construction checks the interpolant against direct
// solves between the nodes and throws Inconsistency if the relative error
// exceeds kBoundTableTolerance.
inline constexpr double kBoundTableTolerance = 1e-10;

class BoundTable {
 public:
  BoundTable(const ExponentPair& ex, BallDim dim, double r_max, const SolverOptions& opts = {});

  const ExponentPair& exponents() const noexcept { return ex_; }
  BallDim dim() const noexcept { return dim_; }
  double r_max() const noexcept { return r_max_; }
  double validation_error() const noexcept { return validation_error_; }

  // Requires r in [0, r_max].
  double operator()(double r) const;

 private:
  ExponentPair ex_;
  BallDim dim_;
  double r_max_;
  double validation_error_ = 0.0;
  // values_[k * kNodes + j]: g_p at the j-th Chebyshev point of panel k.
  std::vector<double> values_;
};

double schwarz_bound(const BallPoint& x, const ExponentPair& ex, BallDim dim, double norm,
                     const SolverOptions& opts = {});

}  // namespace schwarz
