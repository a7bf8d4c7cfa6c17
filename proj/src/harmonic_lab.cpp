#include "schwarz/harmonic_lab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "schwarz/errors.hpp"

namespace schwarz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kViolationTolerance = 1e-7;
constexpr double kGradientTolerance = 1e-9;
constexpr int kPanelNodes = 24;
constexpr int kMaxBisections = 30;
constexpr double kPanelTolerance = 1e-13;
// Per-circle tolerance on the sphere, where the azimuthal rule dominates the error.
constexpr double kCircleTolerance = 1e-10;
constexpr int kMaxGreatCircles = 256;
constexpr int kMaxCircleNodes = 1 << 16;

void check_lab_dim(BallDim dim) {
  if (dim.value() != 2 && dim.value() != 3) {
    throw UnsupportedDimension("explicit harmonic bases exist for n = 2, 3 only (got n=" +
                               std::to_string(dim.value()) +
                               "); use monte_carlo_check for higher dimensions");
  }
}

int basis_offset(BallDim dim, int degree) {
  return dim.value() == 2 ? 2 * (degree - 1) : degree * degree - 1;
}

int total_basis(BallDim dim, int max_degree) { return basis_offset(dim, max_degree + 1); }

double factorial(int k) { return std::exp(std::lgamma(k + 1.0)); }

// Coefficients as an m x total_basis matrix plus the offset.
struct DenseMap {
  BallDim dim;
  int m;
  int max_degree;
  std::vector<double> coeffs;  // row-major m x size
  int size;
  std::vector<double> offset;

  explicit DenseMap(const HarmonicSample& s)
      : dim(s.dim),
        m(s.target_dim),
        max_degree(s.max_degree),
        size(total_basis(s.dim, s.max_degree)),
        offset(s.offset) {
    coeffs.assign(static_cast<std::size_t>(m) * size, 0.0);
    offset.resize(m, 0.0);
    for (int c = 0; c < m; ++c) {
      for (const HarmonicTerm& term : s.terms[c]) {
        coeffs[static_cast<std::size_t>(c) * size + basis_offset(dim, term.degree) + term.index] +=
            term.coeff;
      }
    }
  }

  void eval(std::span<const double> x, double* out) const {
    const std::vector<double> basis = harmonic_basis(dim, max_degree, x);
    for (int c = 0; c < m; ++c) {
      const double* row = coeffs.data() + static_cast<std::size_t>(c) * size;
      double v = offset[c];
      for (int i = 0; i < size; ++i) v += row[i] * basis[i];
      out[c] = v;
    }
  }

  double abs_at(std::span<const double> x) const {
    double buf[8];
    std::vector<double> heap;
    double* out = buf;
    if (m > 8) {
      heap.resize(m);
      out = heap.data();
    }
    eval(x, out);
    if (m == 1) return std::abs(out[0]);
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += out[c] * out[c];
    return std::sqrt(s);
  }

  double first_at(std::span<const double> x) const {
    double buf[8];
    std::vector<double> heap;
    double* out = buf;
    if (m > 8) {
      heap.resize(m);
      out = heap.data();
    }
    eval(x, out);
    return out[0];
  }
};

const QuadratureRule& legendre_rule(int nodes) {
  static const QuadratureRule panel = gauss_jacobi(kPanelNodes, 0.0, 0.0);
  if (nodes == kPanelNodes) return panel;
  throw InvalidArgument("unsupported panel rule size");
}

template <class F>
double gauss_panel(F&& f, double a, double b) {
  const QuadratureRule& rule = legendre_rule(kPanelNodes);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

// Rules for |f|^p on an arc whose ends may be simple zeros of f:
// rules[right][left] carries the weight (1-u)^p at a zero on the right and
// (1+u)^p at a zero on the left.
struct ZeroEndRules {
  double p;
  QuadratureRule rules[2][2];

  explicit ZeroEndRules(double p_) : p(p_) {
    for (int right = 0; right < 2; ++right) {
      for (int left = 0; left < 2; ++left) {
        rules[right][left] = gauss_jacobi(kPanelNodes, right ? p : 0.0, left ? p : 0.0);
      }
    }
  }

  // power(t) must return |f(t)|^p times a factor smooth on [a, b].
  template <class F>
  double integrate(F&& power, double a, double b, bool zero_left, bool zero_right) const {
    const QuadratureRule& rule = rules[zero_right][zero_left];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = rule.nodes[i];
      double v = power(mid + half * u);
      if (zero_left) v /= std::pow(1.0 + u, p);
      if (zero_right) v /= std::pow(1.0 - u, p);
      sum += rule.weights[i] * v;
    }
    return half * sum;
  }

  // Bisects until the one-panel and two-panel estimates agree to tol (split
  // between the halves). |f|^p is not smooth near a double zero of f without
  // sign change, which no zero scan detects. err accumulates the differences.
  template <class F>
  double adaptive(F&& power, double a, double b, bool zero_left, bool zero_right, double tol,
                  double& err, int depth = 0) const {
    const double mid = 0.5 * (a + b);
    const double whole = integrate(power, a, b, zero_left, zero_right);
    const double left = integrate(power, a, mid, zero_left, false);
    const double right = integrate(power, mid, b, false, zero_right);
    const double diff = std::abs(whole - (left + right));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right);
    if (diff <= std::max(tol, floor) || depth >= kMaxBisections) {
      err += diff;
      return left + right;
    }
    return adaptive(power, a, mid, zero_left, false, 0.5 * tol, err, depth + 1) +
           adaptive(power, mid, b, false, zero_right, 0.5 * tol, err, depth + 1);
  }
};

// Sign changes of g on the scan grid of [a, b], refined to full precision.
template <class G>
std::vector<double> find_roots(G&& g, double a, double b, int scan) {
  std::vector<double> roots;
  double x0 = a;
  double g0 = g(x0);
  for (int i = 1; i <= scan; ++i) {
    const double x1 = a + (b - a) * i / scan;
    const double g1 = g(x1);
    if (g0 == 0.0) {
      if (x0 > a && x0 < b) roots.push_back(x0);
    } else if (g0 * g1 < 0.0) {
      std::uintmax_t iters = 100;
      const auto [lo, hi] = boost::math::tools::toms748_solve(
          g, x0, x1, g0, g1, boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

bool is_even_integer(double p) { return p == std::floor(p) && std::fmod(p, 2.0) == 0.0; }

NormEstimate circle_norm(const DenseMap& map, double p, double radius) {
  auto point = [radius](double th) {
    return std::array<double, 2>{radius * std::cos(th), radius * std::sin(th)};
  };
  auto power = [&](double th) {
    const auto x = point(th);
    return std::pow(map.abs_at(x), p);
  };
  auto trapezoid = [&](int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += power(2.0 * kPi * i / n);
    return s / n;
  };
  const int degree = map.max_degree;

  double coarse = 0.0;
  double fine = 0.0;
  if (is_even_integer(p)) {
    const int n = static_cast<int>(p) * degree + 2;
    coarse = trapezoid(n);
    fine = trapezoid(2 * n);
  } else {
    std::vector<double> roots;
    if (map.m == 1) {
      roots = find_roots(
          [&](double th) {
            const auto x = point(th);
            return map.first_at(x);
          },
          0.0, 2.0 * kPi, 64 * degree + 64);
    }
    if (!roots.empty()) {
      // Between consecutive simple zeros |f|^p = |t - a|^p |b - t|^p times a
      // smooth factor; the Jacobi weight absorbs the end behaviour.
      const ZeroEndRules rules(p);
      double rough = 0.0;
      for (std::size_t i = 0; i < roots.size(); ++i) {
        const double a = roots[i];
        const double b = i + 1 < roots.size() ? roots[i + 1] : roots[0] + 2.0 * kPi;
        rough += rules.integrate(power, a, b, true, true);
      }
      double err = 0.0;
      for (std::size_t i = 0; i < roots.size(); ++i) {
        const double a = roots[i];
        const double b = i + 1 < roots.size() ? roots[i + 1] : roots[0] + 2.0 * kPi;
        fine += rules.adaptive(power, a, b, true, true, kPanelTolerance * rough, err);
      }
      fine /= 2.0 * kPi;
      coarse = std::max(0.0, fine - err / (2.0 * kPi));
    } else {
      int n = 32 * degree + 32;
      coarse = trapezoid(n);
      fine = trapezoid(2 * n);
      while (std::abs(fine - coarse) > 1e-13 * fine && 2 * n < kMaxCircleNodes) {
        n *= 2;
        coarse = fine;
        fine = trapezoid(2 * n);
      }
    }
  }
  const double value = std::pow(fine, 1.0 / p);
  const double delta = std::abs(value - std::pow(coarse, 1.0 / p));
  return {value, delta, delta <= kNormConvergence * std::max(value, 1e-300)};
}

// f restricted to the great circle (sin t cos phi, sin t sin phi, cos t) is a
// trigonometric polynomial of degree D in t; its coefficients come from 2D+1
// equispaced samples.
class PoleCircle {
 public:
  PoleCircle(const DenseMap& map, double phi, double radius)
      : m_(map.m), degree_(map.max_degree) {
    const int count = 2 * degree_ + 1;
    cos_.assign(static_cast<std::size_t>(m_) * (degree_ + 1), 0.0);
    sin_.assign(cos_.size(), 0.0);
    std::vector<double> val(m_);
    for (int j = 0; j < count; ++j) {
      const double t = 2.0 * kPi * j / count;
      const std::array<double, 3> x{radius * std::sin(t) * std::cos(phi),
                                    radius * std::sin(t) * std::sin(phi), radius * std::cos(t)};
      map.eval(x, val.data());
      for (int k = 0; k <= degree_; ++k) {
        const double ck = std::cos(k * t);
        const double sk = std::sin(k * t);
        for (int c = 0; c < m_; ++c) {
          cos_[c * (degree_ + 1) + k] += val[c] * ck;
          sin_[c * (degree_ + 1) + k] += val[c] * sk;
        }
      }
    }
    for (int c = 0; c < m_; ++c) {
      for (int k = 0; k <= degree_; ++k) {
        const double scale = (k == 0 ? 1.0 : 2.0) / count;
        cos_[c * (degree_ + 1) + k] *= scale;
        sin_[c * (degree_ + 1) + k] *= scale;
      }
    }
  }

  void eval(double t, double* out) const {
    const std::complex<double> step(std::cos(t), std::sin(t));
    for (int c = 0; c < m_; ++c) out[c] = cos_[c * (degree_ + 1)];
    std::complex<double> e = 1.0;
    for (int k = 1; k <= degree_; ++k) {
      e *= step;
      for (int c = 0; c < m_; ++c) {
        out[c] += cos_[c * (degree_ + 1) + k] * e.real() + sin_[c * (degree_ + 1) + k] * e.imag();
      }
    }
  }

 private:
  int m_;
  int degree_;
  std::vector<double> cos_, sin_;
};

std::array<double, 3> sphere_point(double theta, double phi, double radius) {
  const double st = std::sin(theta);
  return {radius * st * std::cos(phi), radius * st * std::sin(phi), radius * std::cos(theta)};
}

NormEstimate sphere_norm(const DenseMap& map, double p, double radius) {
  const int degree = map.max_degree;
  auto power_at = [&](double theta, double phi) {
    const auto x = sphere_point(theta, phi, radius);
    return std::pow(map.abs_at(x), p);
  };

  if (is_even_integer(p)) {
    // |f|^p is a polynomial of degree p*D on the sphere: Gauss-Legendre in
    // cos(theta) times the trapezoid rule in phi integrates it exactly.
    auto product_rule = [&](int nz, int nphi) {
      const QuadratureRule rule = gauss_jacobi(nz, 0.0, 0.0);
      double s = 0.0;
      for (int i = 0; i < nz; ++i) {
        const double theta = std::acos(rule.nodes[i]);
        double ring = 0.0;
        for (int k = 0; k < nphi; ++k) ring += power_at(theta, 2.0 * kPi * k / nphi);
        s += rule.weights[i] * ring / nphi;
      }
      return 0.5 * s;
    };
    const int pd = static_cast<int>(p) * degree;
    const double coarse = product_rule(pd / 2 + 2, pd + 2);
    const double fine = product_rule(pd / 2 + 4, pd + 6);
    const double value = std::pow(fine, 1.0 / p);
    const double delta = std::abs(value - std::pow(coarse, 1.0 / p));
    return {value, delta, delta <= kNormConvergence * std::max(value, 1e-300)};
  }

  const ZeroEndRules rules(p);
  // Great circle through the poles at azimuth phi, theta in [0, 2pi): it
  // covers the meridians at phi and phi + pi. Integrates |f|^p |sin(theta)|,
  // split at the poles and, for scalar f, at the zeros of f.
  auto great_circle = [&](double phi) {
    const PoleCircle circle(map, phi, radius);
    std::vector<double> val(map.m);
    auto integrand = [&](double theta) {
      circle.eval(theta, val.data());
      double s = 0.0;
      for (double v : val) s += v * v;
      const double mag = map.m == 1 ? std::abs(val[0]) : std::sqrt(s);
      return (p == 1.0 ? mag : std::pow(mag, p)) * std::abs(std::sin(theta));
    };
    // (position, is a zero of f)
    std::vector<std::pair<double, bool>> ends{{0.0, false}, {kPi, false}, {2.0 * kPi, false}};
    if (map.m == 1) {
      const auto roots = find_roots(
          [&](double theta) {
            circle.eval(theta, val.data());
            return val[0];
          },
          0.0, 2.0 * kPi, 16 * degree + 32);
      for (double t : roots) ends.push_back({t, true});
    } else {
      ends.insert(ends.end(), {{0.5 * kPi, false}, {1.5 * kPi, false}});
    }
    std::sort(ends.begin(), ends.end());
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
      const auto [a, zero_a] = ends[i];
      const auto [b, zero_b] = ends[i + 1];
      if (b > a) rough += rules.integrate(integrand, a, b, zero_a, zero_b);
    }
    double s = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
      const auto [a, zero_a] = ends[i];
      const auto [b, zero_b] = ends[i + 1];
      if (b > a) s += rules.adaptive(integrand, a, b, zero_a, zero_b, kCircleTolerance * rough, err);
    }
    return s;
  };

  // The circle integral is pi-periodic in phi: trapezoid rule with doubling.
  int n = 2 * degree + 4;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += great_circle(kPi * k / n);
  double coarse = sum / n;
  double fine = coarse;
  while (true) {
    for (int k = 0; k < n; ++k) sum += great_circle(kPi * (k + 0.5) / n);
    n *= 2;
    fine = sum / n;
    if (std::abs(fine - coarse) <= 1e-11 * fine || n >= kMaxGreatCircles) break;
    coarse = fine;
  }
  // dsigma = sin(theta) dtheta dphi / (4 pi) and the phi-range has length pi.
  const double value = std::pow(0.25 * fine, 1.0 / p);
  const double delta = std::abs(value - std::pow(0.25 * coarse, 1.0 / p));
  return {value, delta, delta <= kNormConvergence * std::max(value, 1e-300)};
}

NormEstimate circle_sup(const DenseMap& map, double radius) {
  auto neg_abs = [&](double th) {
    const std::array<double, 2> x{radius * std::cos(th), radius * std::sin(th)};
    return -map.abs_at(x);
  };
  const int scan = 64 * map.max_degree + 64;
  std::vector<double> values(scan);
  for (int i = 0; i < scan; ++i) values[i] = -neg_abs(2.0 * kPi * i / scan);
  const double grid_max = *std::max_element(values.begin(), values.end());
  double best = grid_max;
  const double h = 2.0 * kPi / scan;
  for (int i = 0; i < scan; ++i) {
    const double prev = values[(i + scan - 1) % scan];
    const double next = values[(i + 1) % scan];
    if (values[i] >= prev && values[i] >= next) {
      const double th = 2.0 * kPi * i / scan;
      const auto [arg, val] = boost::math::tools::brent_find_minima(neg_abs, th - h, th + h, 52);
      best = std::max(best, -val);
    }
  }
  return {best, best - grid_max, true};
}

NormEstimate sphere_sup(const DenseMap& map, double radius) {
  auto abs_at = [&](double theta, double phi) {
    const auto x = sphere_point(theta, phi, radius);
    return map.abs_at(x);
  };
  const int nt = 8 * map.max_degree + 16;
  const int np = 16 * map.max_degree + 32;
  struct Candidate {
    double value, theta, phi;
  };
  std::vector<Candidate> grid;
  grid.reserve(static_cast<std::size_t>(nt + 1) * np);
  for (int i = 0; i <= nt; ++i) {
    const double theta = kPi * i / nt;
    for (int k = 0; k < np; ++k) {
      const double phi = 2.0 * kPi * k / np;
      grid.push_back({abs_at(theta, phi), theta, phi});
    }
  }
  const std::size_t keep = std::min<std::size_t>(12, grid.size());
  std::partial_sort(grid.begin(), grid.begin() + keep, grid.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  const double grid_max = grid.front().value;
  double best = grid_max;
  for (std::size_t c = 0; c < keep; ++c) {
    Candidate cur = grid[c];
    double step = kPi / nt;
    while (step > 1e-10) {
      bool moved = false;
      const double moves[4][2] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
      for (const auto& mv : moves) {
        const double theta = std::clamp(cur.theta + mv[0], 0.0, kPi);
        const double phi = cur.phi + mv[1];
        const double v = abs_at(theta, phi);
        if (v > cur.value) {
          cur = {v, theta, phi};
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, cur.value);
  }
  return {best, best - grid_max, true};
}

// Weights of the m-th derivative at 0 on the given nodes.
std::vector<double> fornberg_weights(int m, std::span<const double> z) {
  const int n = static_cast<int>(z.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = z[0];
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = z[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = z[i] - z[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace

int basis_size(BallDim dim, int degree) {
  check_lab_dim(dim);
  return dim.value() == 2 ? 2 : 2 * degree + 1;
}

std::vector<double> harmonic_basis(BallDim dim, int max_degree, std::span<const double> x) {
  check_lab_dim(dim);
  std::vector<double> out(total_basis(dim, max_degree));
  if (dim.value() == 2) {
    const std::complex<double> z(x[0], x[1]);
    std::complex<double> zk = 1.0;
    for (int k = 1; k <= max_degree; ++k) {
      zk *= z;
      out[2 * (k - 1)] = zk.real();
      out[2 * (k - 1) + 1] = zk.imag();
    }
    return out;
  }

  // Scaled regular solid harmonics R_lm = r^l P_l^m(cos) e^{im phi} / (l+m)!,
  //   R_{l+1,l+1} = -(x + iy) R_ll / (2l + 2),
  //   R_{l+1,m}   = ((2l+1) z R_lm - r^2 R_{l-1,m}) / ((l+m+1)(l-m+1)).
  using cplx = std::complex<double>;
  const int d = max_degree;
  const cplx xy(x[0], x[1]);
  const double z = x[2];
  const double r2 = x[0] * x[0] + x[1] * x[1] + z * z;
  std::vector<cplx> prev(d + 2, 0.0), cur(d + 2, 0.0), next(d + 2, 0.0);
  cur[0] = 1.0;  // l = 0
  for (int l = 0; l < d; ++l) {
    std::fill(next.begin(), next.end(), cplx(0.0));
    next[l + 1] = -xy * cur[l] / (2.0 * l + 2.0);
    for (int m = 0; m <= l; ++m) {
      next[m] = ((2.0 * l + 1.0) * z * cur[m] - r2 * prev[m]) /
                ((l + m + 1.0) * (l - m + 1.0));
    }
    prev.swap(cur);
    cur.swap(next);
    const int k = l + 1;
    const int base = basis_offset(dim, k);
    out[base] = cur[0].real() * std::sqrt(2.0 * k + 1.0) * factorial(k);
    for (int m = 1; m <= k; ++m) {
      const double scale = std::sqrt(2.0 * (2.0 * k + 1.0) * factorial(k + m) * factorial(k - m));
      out[base + 2 * m - 1] = cur[m].real() * scale;
      out[base + 2 * m] = cur[m].imag() * scale;
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combination of both inputs
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HarmonicSample random_harmonic(BallDim dim, int max_degree, int target_dim, std::uint64_t seed) {
  check_lab_dim(dim);
  if (max_degree < 1 || max_degree > kMaxHarmonicDegree) {
    throw InvalidArgument("max degree must lie in [1, " + std::to_string(kMaxHarmonicDegree) +
                          "], got " + std::to_string(max_degree));
  }
  if (target_dim < 1) throw InvalidArgument("target dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  HarmonicSample s;
  s.dim = dim;
  s.target_dim = target_dim;
  s.max_degree = max_degree;
  s.seed = seed;
  s.offset.assign(target_dim, 0.0);
  s.terms.resize(target_dim);
  for (int c = 0; c < target_dim; ++c) {
    for (int k = 1; k <= max_degree; ++k) {
      for (int i = 0; i < basis_size(dim, k); ++i) s.terms[c].push_back({k, i, normal(rng)});
    }
  }
  return s;
}

HarmonicSample linear_harmonic(BallDim dim, const Eigen::MatrixXd& M) {
  check_lab_dim(dim);
  const int n = dim.value();
  if (M.cols() != n || M.rows() < 1) throw InvalidArgument("matrix must be m x n");
  // B(i, j) = i-th degree-1 basis function at e_j.
  Eigen::MatrixXd B(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto basis = harmonic_basis(dim, 1, e);
    for (int i = 0; i < n; ++i) B(i, j) = basis[i];
  }
  const Eigen::MatrixXd C = M * B.inverse();
  HarmonicSample s;
  s.dim = dim;
  s.target_dim = static_cast<int>(M.rows());
  s.max_degree = 1;
  s.offset.assign(s.target_dim, 0.0);
  s.terms.resize(s.target_dim);
  for (int c = 0; c < s.target_dim; ++c) {
    for (int i = 0; i < n; ++i) {
      if (C(c, i) != 0.0) s.terms[c].push_back({1, i, C(c, i)});
    }
  }
  return s;
}

HarmonicSample with_offset(HarmonicSample s, std::vector<double> offset) {
  if (static_cast<int>(offset.size()) != s.target_dim) {
    throw InvalidArgument("offset must have one entry per output component");
  }
  s.offset = std::move(offset);
  return s;
}

std::vector<double> evaluate_harmonic(const HarmonicSample& s, std::span<const double> x) {
  if (static_cast<int>(x.size()) != s.dim.value()) {
    throw InvalidArgument("point dimension does not match the sample");
  }
  double norm2 = 0.0;
  for (double c : x) norm2 += c * c;
  if (norm2 > 1.0 + 1e-12) throw OutOfBall("evaluation point outside the closed ball");
  const DenseMap map(s);
  std::vector<double> out(s.target_dim);
  map.eval(x, out.data());
  return out;
}

std::vector<double> numerical_laplacian(const HarmonicSample& s, std::span<const double> x,
                                        double step) {
  static const std::vector<double> weights = [] {
    std::vector<double> z;
    for (int k = -6; k <= 6; ++k) z.push_back(k);
    return fornberg_weights(2, z);
  }();
  const DenseMap map(s);
  const int n = s.dim.value();
  std::vector<double> lap(s.target_dim, 0.0);
  std::vector<double> y(x.begin(), x.end());
  std::vector<double> val(s.target_dim);
  for (int j = 0; j < n; ++j) {
    for (int k = -6; k <= 6; ++k) {
      y[j] = x[j] + k * step;
      map.eval(y, val.data());
      for (int c = 0; c < s.target_dim; ++c) lap[c] += weights[k + 6] * val[c];
    }
    y[j] = x[j];
  }
  for (double& v : lap) v /= step * step;
  return lap;
}

NormEstimate boundary_p_norm(const HarmonicSample& s, const Exponent& p, double radius) {
  check_lab_dim(s.dim);
  if (!(radius > 0.0 && radius <= 1.0)) throw InvalidRadius("norm radius must lie in (0, 1]");
  const DenseMap map(s);
  if (s.dim.value() == 2) {
    return p.is_infinite() ? circle_sup(map, radius) : circle_norm(map, p.value(), radius);
  }
  return p.is_infinite() ? sphere_sup(map, radius) : sphere_norm(map, p.value(), radius);
}

GradientAtOrigin gradient_at_origin(const HarmonicSample& s) {
  check_lab_dim(s.dim);
  const int n = s.dim.value();
  Eigen::MatrixXd B(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto basis = harmonic_basis(s.dim, 1, e);
    for (int i = 0; i < n; ++i) B(i, j) = basis[i];
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s.target_dim, n);
  for (int c = 0; c < s.target_dim; ++c) {
    for (const HarmonicTerm& term : s.terms[c]) {
      if (term.degree != 1) continue;
      J.row(c) += term.coeff * B.row(term.index);
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const double norm = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return {J, norm};
}

namespace {

template <class Bound>
BoundCheckReport run_schwarz_trials(const HarmonicSample& s, const Exponent& p, int trials,
                                    std::uint64_t seed, Bound&& bound) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  const NormEstimate norm = boundary_p_norm(s, p);
  BoundCheckReport rep;
  rep.sample_id = s.seed;
  rep.trials = trials;
  rep.norm = norm.value;
  rep.norm_converged = norm.converged;
  rep.worst_slack = std::numeric_limits<double>::infinity();

  const int n = s.dim.value();
  const DenseMap map(s);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, kTrialRadiusMax);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (int i = 0; i < trials; ++i) {
    const double r = radius(rng);
    double len2 = 0.0;
    for (double& c : x) {
      c = normal(rng);
      len2 += c * c;
    }
    const double scale = r / std::sqrt(len2);
    for (double& c : x) c *= scale;
    const double lhs = map.abs_at(x);
    const double rhs = bound(r) * norm.value;
    rep.worst_slack = std::min(rep.worst_slack, rhs - lhs);
    if (lhs > rhs + kViolationTolerance * norm.value) ++rep.violations;
  }
  return rep;
}

}  // namespace

BoundCheckReport check_schwarz(const HarmonicSample& s, const ExponentPair& ex, int trials,
                               std::uint64_t seed, const SolverOptions& opts) {
  return run_schwarz_trials(s, ex.p, trials, seed,
                            [&](double r) { return g_p(r, ex, s.dim, opts); });
}

BoundCheckReport check_schwarz(const HarmonicSample& s, const BoundTable& table, int trials,
                               std::uint64_t seed) {
  if (!(table.dim() == s.dim)) throw InvalidArgument("table dimension does not match the sample");
  if (table.r_max() < kTrialRadiusMax) {
    throw InvalidArgument("table must cover radii up to " + std::to_string(kTrialRadiusMax));
  }
  return run_schwarz_trials(s, table.exponents().p, trials, seed, table);
}

InequalityCheck check_gradient(const HarmonicSample& s, const ExponentPair& ex) {
  const double lhs = gradient_at_origin(s).operator_norm;
  const double norm = boundary_p_norm(s, ex.p).value;
  const double rhs = sharp_gradient_constant(ex, s.dim) * norm;
  return {lhs, rhs, rhs - lhs, lhs > rhs + kGradientTolerance * std::max(1.0, norm)};
}

InequalityCheck check_corollary(const HarmonicSample& s, std::span<const double> shift) {
  if (static_cast<int>(shift.size()) != s.target_dim) {
    throw InvalidArgument("shift must have one entry per output component");
  }
  std::vector<double> total(s.target_dim, 0.0);
  double shift2 = 0.0;
  for (int c = 0; c < s.target_dim; ++c) {
    total[c] = (c < static_cast<int>(s.offset.size()) ? s.offset[c] : 0.0) + shift[c];
    shift2 += total[c] * total[c];
  }
  const HarmonicSample shifted = with_offset(s, total);
  const double l2 = boundary_p_norm(shifted, Exponent::finite(2.0)).value;
  const double lhs = gradient_at_origin(shifted).operator_norm;
  const double rhs =
      std::sqrt(static_cast<double>(s.dim.value())) * std::sqrt(std::max(0.0, l2 * l2 - shift2));
  return {lhs, rhs, rhs - lhs, lhs > rhs + kGradientTolerance};
}

MonteCarloReport monte_carlo_check(BallDim dim, const ExponentPair& ex,
                                   const BoundaryFunction& boundary_fn, int samples,
                                   std::uint64_t seed, std::span<const BallPoint> points,
                                   const SolverOptions& opts) {
  if (samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  const auto etas = uniform_sphere_samples(dim, samples, seed);
  std::vector<double> f(samples);
  double mean = 0.0;
  for (int i = 0; i < samples; ++i) {
    f[i] = boundary_fn(etas[i]);
    mean += f[i];
  }
  mean /= samples;
  for (double& v : f) v -= mean;

  MonteCarloReport rep;
  rep.sample_mean = mean;
  rep.trials = static_cast<int>(points.size());
  const double count = samples;
  if (ex.p.is_infinite()) {
    for (double v : f) rep.norm = std::max(rep.norm, std::abs(v));
  } else {
    const double p = ex.p.value();
    double s1 = 0.0, s2 = 0.0;
    for (double v : f) {
      const double w = std::pow(std::abs(v), p);
      s1 += w;
      s2 += w * w;
    }
    const double m1 = s1 / count;
    const double var = std::max(0.0, s2 / count - m1 * m1);
    rep.norm = std::pow(m1, 1.0 / p);
    rep.norm_stderr = m1 > 0.0 ? std::pow(m1, 1.0 / p - 1.0) / p * std::sqrt(var / count) : 0.0;
  }

  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (const BallPoint& x : points) {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double w = poisson_kernel(x, etas[i], dim) * f[i];
      s1 += w;
      s2 += w * w;
    }
    const double u = s1 / count;
    const double se_u = std::sqrt(std::max(0.0, s2 / count - u * u) / count);
    const double g = g_p(x.norm(), ex, dim, opts);
    const double rhs = g * rep.norm;
    const double tol = 5.0 * (se_u + g * rep.norm_stderr);
    rep.worst_slack = std::min(rep.worst_slack, rhs - std::abs(u));
    if (std::abs(u) > rhs + tol) ++rep.inconclusive;
  }
  return rep;
}

}  // namespace schwarz
