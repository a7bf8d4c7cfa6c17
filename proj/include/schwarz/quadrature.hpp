#pragma once

// Integration over the unit sphere S^{n-1} of functions that depend only on
// the last coordinate t = eta_n. With the normalized surface measure,
//
//   \int_S h(eta_n) dsigma(eta) = c_n \int_{-1}^{1} h(t) (1 - t^2)^{(n-3)/2} dt,
//   c_n = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)),
//
// so every such integral is a Gauss-Jacobi sum.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace schwarz {

// Ambient dimension n of B^n; the sphere is S^{n-1}.
class BallDim {
 public:
  explicit BallDim(int n);
  int value() const noexcept { return n_; }
  // Exponent (n-3)/2 of the zonal weight.
  double weight_exponent() const noexcept { return 0.5 * (n_ - 3); }
  friend bool operator==(BallDim, BallDim) = default;

 private:
  int n_;
};

// Nodes ascending in (-1, 1), positive weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule for the weight (1-u)^a (1+u)^b on [-1, 1], exact for
// polynomials of degree 2*node_count - 1. Nodes are found by Newton iteration
// on the three-term recurrence.
QuadratureRule gauss_jacobi(int node_count, double a, double b);

// Sphere rule for zonal integrands: weights already include c_n so that the
// rule applied to 1 gives 1.
struct JacobiRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double alpha = 0.0;
  double normalization = 1.0;

  template <class F>
  double apply(F&& h) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * h(nodes[i]);
    return sum;
  }
};

JacobiRule jacobi_rule(BallDim dim, int node_count);

// c_n computed through log-Gamma.
double sphere_normalization(BallDim dim);

inline constexpr int kDefaultNodeCount = 128;

// A real function of t = eta_n in [-1, 1].
//
// known_kinks lists points where the profile is not smooth; integrals split
// there. focus is the radius r of a Poisson kernel P_r the profile is built
// from (0 when none); the integrator resolves the peak of P_r at t = 1 with a
// logarithmic change of variable when focus is large.
struct ZonalProfile {
  std::function<double(double)> eval;
  std::vector<double> known_kinks;
  double focus = 0.0;

  double operator()(double t) const { return eval(t); }
};

// Immutable set of Gauss-Jacobi rules for one (n, node_count) pair, with a
// piecewise integrator that handles interior kinks and kernel peaks.
class SphereQuadrature {
 public:
  SphereQuadrature(BallDim dim, int node_count);

  // Process-wide cache; returned references stay valid for the program
  // lifetime. Safe to call concurrently.
  static const SphereQuadrature& shared(BallDim dim, int node_count);

  BallDim dim() const noexcept { return dim_; }
  int node_count() const noexcept { return node_count_; }

  // sigma-integral of h(eta_n). Splits at every point of `splits` strictly
  // inside (-1, 1) and at h.known_kinks; the pieces adjacent to a split are
  // graded so that |t - t0|^beta behaviour there is integrated to high order.
  // `focus` is combined with h.focus (the larger one wins).
  double integrate(const ZonalProfile& h, std::span<const double> splits = {},
                   double focus = 0.0) const;

  // Same, for a bare callable without kink metadata.
  double integrate(const std::function<double(double)>& h,
                   std::span<const double> splits = {},
                   double focus = 0.0) const;

 private:
  BallDim dim_;
  int node_count_;
  double normalization_;
  // Indexed by [weight at +1][weight at -1]: whether the piece touches t=1 / t=-1.
  QuadratureRule rules_[2][2];
};

// sigma-integral of h(eta_n) over S^{n-1}. With split_at, [-1, split_at] and
// [split_at, 1] are integrated with separate rules and summed.
double zonal_integral(const ZonalProfile& h, BallDim dim,
                      std::optional<double> split_at = std::nullopt,
                      int node_count = kDefaultNodeCount);

// Uniformly distributed points on S^{n-1} (normalized Gaussian vectors).
// Deterministic for a given seed.
std::vector<std::vector<double>> uniform_sphere_samples(BallDim dim, int count,
                                                        std::uint64_t seed);

}  // namespace schwarz
