#include "schwarz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "schwarz/errors.hpp"

namespace schwarz {

namespace {

// Splits closer than this to +-1 are ignored.
constexpr double kEndpointGuard = 1e-12;
// Grading power applied next to an interior split.
constexpr int kGradePower = 4;
// Above this kernel radius pieces are integrated in w = log(1 + r^2 - 2rt).
constexpr double kLogMapThreshold = 0.5;

struct JacobiValue {
  double p;    // P_N(x)
  double pm1;  // P_{N-1}(x)
};

JacobiValue jacobi_recurrence(int n, double a, double b, double x) {
  double p0 = 1.0;
  if (n == 0) return {p0, 0.0};
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

double jacobi_derivative(int n, double a, double b, double x, const JacobiValue& v) {
  const double c = 2.0 * n + a + b;
  return (n * ((a - b) - c * x) * v.p + 2.0 * (n + a) * (n + b) * v.pm1) /
         (c * (1.0 - x) * (1.0 + x));
}

// Stable 1 + r^2 - 2rt.
double axial_distance_sq(double r, double t) {
  return t >= 0.0 ? (1.0 - r) * (1.0 - r) + 2.0 * r * (1.0 - t)
                  : (1.0 + r) * (1.0 + r) - 2.0 * r * (1.0 + t);
}

struct Grading {
  double g;   // position in [0, 1]
  double gc;  // 1 - g, computed without cancellation
  double dg;  // dg/ds
};

Grading grade(double s, double sr, bool at_left, bool at_right) {
  constexpr int k = kGradePower;
  if (at_left && at_right) {
    const double sk = std::pow(s, k);
    const double srk = std::pow(sr, k);
    const double d = sk + srk;
    return {sk / d, srk / d, k * std::pow(s, k - 1) * std::pow(sr, k - 1) / (d * d)};
  }
  if (at_left) {
    return {std::pow(s, k), -std::expm1(k * std::log1p(-sr)), k * std::pow(s, k - 1)};
  }
  if (at_right) {
    return {-std::expm1(k * std::log1p(-s)), std::pow(sr, k), k * std::pow(sr, k - 1)};
  }
  return {s, sr, 1.0};
}

}  // namespace

BallDim::BallDim(int n) : n_(n) {
  if (n < 2) {
    throw InvalidDimension("dimension must be >= 2, got " + std::to_string(n));
  }
}

QuadratureRule gauss_jacobi(int node_count, double a, double b) {
  if (node_count < 1) throw InvalidArgument("node count must be >= 1");
  if (!(a > -1.0) || !(b > -1.0)) throw InvalidArgument("Jacobi exponents must exceed -1");

  const int n = node_count;
  std::vector<double> x(n), w(n);
  const double log_c = (a + b + 1.0) * std::numbers::ln2 + std::lgamma(n + a + 1.0) +
                       std::lgamma(n + b + 1.0) - std::lgamma(n + a + b + 1.0) -
                       std::lgamma(n + 1.0);
  const double c = std::exp(log_c);

  for (int i = 0; i < n; ++i) {
    // Exact for the Chebyshev case a = b = -1/2, close to the Legendre
    // asymptotics for a = b = 0.
    const double theta = std::numbers::pi * (2.0 * i + a + 1.5) / (2.0 * n + a + b + 1.0);
    double z = std::cos(theta);
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const JacobiValue v = jacobi_recurrence(n, a, b, z);
      dp = jacobi_derivative(n, a, b, z, v);
      double deflate = 0.0;
      for (int j = 0; j < i; ++j) deflate += 1.0 / (z - x[j]);
      const double step = v.p / (dp - v.p * deflate);
      z -= step;
      z = std::clamp(z, -1.0 + 1e-300, 1.0 - 1e-300);
      if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(z))) break;
    }
    const JacobiValue v = jacobi_recurrence(n, a, b, z);
    dp = jacobi_derivative(n, a, b, z, v);
    x[i] = z;
    w[i] = c / ((1.0 - z) * (1.0 + z) * dp * dp);
  }

  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());

  // The Gamma ratio in c loses ~1e-13 for large node counts; the error is a
  // common factor, so rescale to the exact total mass.
  const double mass = std::exp((a + b + 1.0) * std::numbers::ln2 + std::lgamma(a + 1.0) +
                               std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  double sum = 0.0;
  for (double wi : w) sum += wi;
  for (double& wi : w) wi *= mass / sum;
  for (int i = 0; i < n; ++i) {
    const bool inside = x[i] > -1.0 && x[i] < 1.0 && std::isfinite(w[i]) && w[i] > 0.0;
    const bool ordered = i == 0 || x[i] > x[i - 1];
    if (!inside || !ordered) {
      throw NonConvergence("Gauss-Jacobi Newton iteration failed for n=" +
                           std::to_string(n));
    }
  }
  return {std::move(x), std::move(w)};
}

double sphere_normalization(BallDim dim) {
  const double n = dim.value();
  return std::exp(std::lgamma(0.5 * n) - 0.5 * std::log(std::numbers::pi) -
                  std::lgamma(0.5 * (n - 1.0)));
}

JacobiRule jacobi_rule(BallDim dim, int node_count) {
  if (node_count < 2) {
    throw InvalidArgument("node count must be >= 2, got " + std::to_string(node_count));
  }
  const double alpha = dim.weight_exponent();
  QuadratureRule raw = gauss_jacobi(node_count, alpha, alpha);
  JacobiRule rule;
  rule.alpha = alpha;
  rule.normalization = sphere_normalization(dim);
  rule.nodes = std::move(raw.nodes);
  rule.weights = std::move(raw.weights);
  for (double& wi : rule.weights) wi *= rule.normalization;
  return rule;
}

SphereQuadrature::SphereQuadrature(BallDim dim, int node_count)
    : dim_(dim), node_count_(node_count), normalization_(sphere_normalization(dim)) {
  if (node_count < 2) {
    throw InvalidArgument("node count must be >= 2, got " + std::to_string(node_count));
  }
  const double alpha = dim.weight_exponent();
  for (int right = 0; right < 2; ++right) {
    for (int left = 0; left < 2; ++left) {
      rules_[right][left] = gauss_jacobi(node_count, right ? alpha : 0.0, left ? alpha : 0.0);
    }
  }
}

const SphereQuadrature& SphereQuadrature::shared(BallDim dim, int node_count) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<SphereQuadrature>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{dim.value(), node_count}];
  if (!slot) slot = std::make_unique<SphereQuadrature>(dim, node_count);
  return *slot;
}

double SphereQuadrature::integrate(const std::function<double(double)>& h,
                                   std::span<const double> splits, double focus) const {
  ZonalProfile profile{h, {}, 0.0};
  return integrate(profile, splits, focus);
}

double SphereQuadrature::integrate(const ZonalProfile& h, std::span<const double> splits,
                                   double focus) const {
  std::vector<double> cuts;
  auto add_cut = [&](double t) {
    if (std::isfinite(t) && t > -1.0 + kEndpointGuard && t < 1.0 - kEndpointGuard) {
      cuts.push_back(t);
    }
  };
  for (double t : splits) add_cut(t);
  for (double t : h.known_kinks) add_cut(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> ends;
  ends.reserve(cuts.size() + 2);
  ends.push_back(-1.0);
  ends.insert(ends.end(), cuts.begin(), cuts.end());
  ends.push_back(1.0);

  const double r = std::max(focus, h.focus);
  const bool log_map = r >= kLogMapThreshold;
  const double alpha = dim_.weight_exponent();

  double total = 0.0;
  for (std::size_t piece = 0; piece + 1 < ends.size(); ++piece) {
    const double tl = ends[piece];
    const double tr = ends[piece + 1];
    const bool left_end = piece == 0;
    const bool right_end = piece + 2 == ends.size();
    const QuadratureRule& rule = rules_[right_end][left_end];

    const double len = tr - tl;
    const double el = log_map ? axial_distance_sq(r, tl) : 0.0;
    const double er = log_map ? axial_distance_sq(r, tr) : 0.0;
    const double xl = log_map ? std::log(el) : 0.0;
    const double dx = log_map ? std::log(er) - xl : 0.0;

    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = rule.nodes[i];
      const double s = 0.5 * (1.0 + u);
      const double sr = 0.5 * (1.0 - u);
      const Grading gr = grade(s, sr, !left_end, !right_end);

      double dl, dr, dtds;
      if (log_map) {
        dl = -el * std::expm1(dx * gr.g) / (2.0 * r);
        dr = er * std::expm1(-dx * gr.gc) / (2.0 * r);
        const double ex = gr.g <= 0.5 ? el * std::exp(dx * gr.g) : er * std::exp(-dx * gr.gc);
        dtds = -ex / (2.0 * r) * dx * gr.dg;
      } else {
        dl = len * gr.g;
        dr = len * gr.gc;
        dtds = len * gr.dg;
      }
      const double t = gr.g <= 0.5 ? tl + dl : tr - dr;

      double weight_part = 1.0;
      if (alpha != 0.0) {
        const double one_minus_t = right_end ? dr : 1.0 - t;
        const double one_plus_t = left_end ? dl : 1.0 + t;
        weight_part = (right_end ? std::pow(one_minus_t / (2.0 * sr), alpha)
                                 : std::pow(one_minus_t, alpha)) *
                      (left_end ? std::pow(one_plus_t / (2.0 * s), alpha)
                                : std::pow(one_plus_t, alpha));
      }

      const double value = h.eval(t);
      if (!std::isfinite(value)) {
        throw NonFiniteIntegrand(t, "non-finite integrand value at t=" + std::to_string(t));
      }
      sum += rule.weights[i] * value * weight_part * dtds;
    }
    total += 0.5 * sum;
  }
  return normalization_ * total;
}

double zonal_integral(const ZonalProfile& h, BallDim dim, std::optional<double> split_at,
                      int node_count) {
  if (node_count < 2) {
    throw InvalidArgument("node count must be >= 2, got " + std::to_string(node_count));
  }
  const SphereQuadrature& quad = SphereQuadrature::shared(dim, node_count);
  if (split_at) {
    if (!(*split_at >= -1.0 && *split_at <= 1.0)) {
      throw InvalidArgument("split point must lie in [-1, 1]");
    }
    const double cut[1] = {*split_at};
    return quad.integrate(h, cut);
  }
  return quad.integrate(h);
}

std::vector<std::vector<double>> uniform_sphere_samples(BallDim dim, int count,
                                                        std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  const int n = dim.value();
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> v(n);
    double norm2 = 0.0;
    for (double& c : v) {
      c = normal(rng);
      norm2 += c * c;
    }
    if (norm2 < 1e-200) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& c : v) c *= inv;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace schwarz
