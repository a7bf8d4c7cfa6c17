#pragma once

// Explicit harmonic polynomial maps B^n -> R^m (n = 2, 3) and independent
// checks of the Schwarz bound, the gradient bound at the origin and the
// p = 2 corollary against them.
//
// Bases, per degree k >= 1:
//   n = 2: index 0 -> Re z^k, index 1 -> Im z^k (z = x1 + i x2), unnormalized.
//   n = 3: index 0 -> zonal, 2m-1 -> cos(m phi) part, 2m -> sin(m phi) part of
//          the degree-k solid harmonic of order m, scaled to unit L^2(sigma) norm.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "schwarz/kernel.hpp"
#include "schwarz/quadrature.hpp"
#include "schwarz/schwarz_bound.hpp"

namespace schwarz {

struct HarmonicTerm {
  int degree;
  int index;
  double coeff;
};

struct HarmonicSample {
  BallDim dim{2};
  int target_dim = 1;
  int max_degree = 1;
  // terms[c] lists the terms of output component c.
  std::vector<std::vector<HarmonicTerm>> terms;
  // Constant added to every evaluation. Zero for generated samples; only the
  // corollary check shifts it.
  std::vector<double> offset;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxHarmonicDegree = 12;

int basis_size(BallDim dim, int degree);

// All basis functions of degrees 1..max_degree at x, degree-major.
std::vector<double> harmonic_basis(BallDim dim, int max_degree, std::span<const double> x);

HarmonicSample random_harmonic(BallDim dim, int max_degree, int target_dim, std::uint64_t seed);

// f(x) = M x with M of size m x n, expressed in the degree-1 basis.
HarmonicSample linear_harmonic(BallDim dim, const Eigen::MatrixXd& M);

HarmonicSample with_offset(HarmonicSample s, std::vector<double> offset);

// Requires |x| <= 1.
std::vector<double> evaluate_harmonic(const HarmonicSample& s, std::span<const double> x);

// Sum of second derivatives of each component, by a 13-point finite
// difference stencil (exact for polynomials up to degree 12).
std::vector<double> numerical_laplacian(const HarmonicSample& s, std::span<const double> x,
                                        double step = 0.02);

struct NormEstimate {
  double value;
  // Change of the estimate under the last refinement.
  double refinement_delta;
  bool converged;
};

inline constexpr double kNormConvergence = 1e-8;

// (\int_S |f(radius * eta)|^p dsigma)^{1/p}; the sup over radii of the Hardy
// norm is attained at radius 1 for polynomials.
NormEstimate boundary_p_norm(const HarmonicSample& s, const Exponent& p, double radius = 1.0);

struct GradientAtOrigin {
  Eigen::MatrixXd jacobian;  // m x n
  double operator_norm;      // largest singular value
};

GradientAtOrigin gradient_at_origin(const HarmonicSample& s);

struct BoundCheckReport {
  std::uint64_t sample_id = 0;
  int trials = 0;
  double worst_slack = 0.0;  // min over trials of rhs - lhs
  int violations = 0;        // lhs > rhs + 1e-7 ||f||_p
  double norm = 0.0;
  bool norm_converged = true;
};

// Trial radii are uniform in [0, kTrialRadiusMax], directions uniform.
inline constexpr double kTrialRadiusMax = 0.95;

BoundCheckReport check_schwarz(const HarmonicSample& s, const ExponentPair& ex, int trials,
                               std::uint64_t seed, const SolverOptions& opts = {});

// Same trials, with g_p read from a table covering [0, kTrialRadiusMax].
BoundCheckReport check_schwarz(const HarmonicSample& s, const BoundTable& table, int trials,
                               std::uint64_t seed);

struct InequalityCheck {
  double lhs;
  double rhs;
  double slack;  // rhs - lhs
  bool violated;
};

// ||Df(0)|| <= C_p ||f||_p.
InequalityCheck check_gradient(const HarmonicSample& s, const ExponentPair& ex);

// ||Df(0)|| <= sqrt(n) sqrt(||f + c||_2^2 - |c|^2), evaluated on s shifted by c.
InequalityCheck check_corollary(const HarmonicSample& s, std::span<const double> shift);

using BoundaryFunction = std::function<double(std::span<const double>)>;

struct MonteCarloReport {
  int trials = 0;
  double worst_slack = 0.0;
  // Breaches beyond 5 standard errors; these are inconclusive, not failures.
  int inconclusive = 0;
  double norm = 0.0;
  double norm_stderr = 0.0;
  double sample_mean = 0.0;
};

// Samples boundary data uniformly on S^{n-1}, removes the sample mean so that
// u(0) ~ 0, and checks |u(x)| <= g_p(|x|) ||f||_p at each point with a
// statistical tolerance.
MonteCarloReport monte_carlo_check(BallDim dim, const ExponentPair& ex,
                                   const BoundaryFunction& boundary_fn, int samples,
                                   std::uint64_t seed, std::span<const BallPoint> points,
                                   const SolverOptions& opts = {});

// Deterministic per-index seed derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace schwarz
