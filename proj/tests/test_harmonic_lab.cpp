#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "schwarz/errors.hpp"
#include "schwarz/harmonic_lab.hpp"

using namespace schwarz;

namespace {

HarmonicSample coordinate(int n, int axis) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(1, n);
  M(0, axis) = 1.0;
  return linear_harmonic(BallDim(n), M);
}

HarmonicSample single_term(int n, int degree, int index, double coeff = 1.0) {
  HarmonicSample s;
  s.dim = BallDim(n);
  s.target_dim = 1;
  s.max_degree = degree;
  s.terms = {{HarmonicTerm{degree, index, coeff}}};
  s.offset = {0.0};
  return s;
}

// Surface mean over S^2 by nested adaptive quadrature in (theta, phi).
double sphere_mean3(const std::function<double(double, double, double)>& h) {
  const double v = oracle::integrate(
      [&](double th) {
        return std::sin(th) * oracle::integrate(
                                  [&](double ph) {
                                    return h(std::sin(th) * std::cos(ph),
                                             std::sin(th) * std::sin(ph), std::cos(th));
                                  },
                                  0.0, 2.0 * oracle::kPi);
      },
      0.0, oracle::kPi);
  return v / (4.0 * oracle::kPi);
}

}  // namespace

TEST_CASE("basis sizes") {
  CHECK(basis_size(BallDim(2), 5) == 2);
  CHECK(basis_size(BallDim(3), 5) == 11);
  CHECK_THROWS_AS(basis_size(BallDim(4), 1), UnsupportedDimension);
}

TEST_CASE("plane basis is Re and Im of z^k") {
  const std::vector<double> x{0.3, 0.4};
  const auto b = harmonic_basis(BallDim(2), 3, x);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b[2] == doctest::Approx(-0.07).epsilon(1e-14));
  CHECK(b[3] == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(evaluate_harmonic(single_term(2, 2, 0), x)[0] == doctest::Approx(-0.07).epsilon(1e-14));
}

TEST_CASE("space basis is orthonormal") {
  const int d = 2;
  const int count = basis_size(BallDim(3), 1) + basis_size(BallDim(3), 2);
  for (int i = 0; i < count; ++i) {
    for (int j = i; j < count; ++j) {
      const double g = sphere_mean3([&](double x, double y, double z) {
        const std::vector<double> p{x, y, z};
        const auto b = harmonic_basis(BallDim(3), d, p);
        return b[i] * b[j];
      });
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-11);
    }
  }
  // Degree-1 zonal member is sqrt(3) x_3.
  const std::vector<double> p{0.1, 0.2, 0.3};
  CHECK(harmonic_basis(BallDim(3), 1, p)[0] == doctest::Approx(std::sqrt(3.0) * 0.3).epsilon(1e-14));
}

TEST_CASE("random samples vanish at the origin and are harmonic") {
  for (int n : {2, 3}) {
    for (int deg : {1, 4, 12}) {
      const HarmonicSample s = random_harmonic(BallDim(n), deg, 2, derive_seed(5, deg));
      const std::vector<double> zero(n, 0.0);
      for (double v : evaluate_harmonic(s, zero)) CHECK(v == 0.0);
      std::vector<double> x(n, 0.0);
      x[0] = 0.3;
      x[n - 1] = -0.2;
      const auto f = evaluate_harmonic(s, x);
      const auto lap = numerical_laplacian(s, x);
      for (std::size_t c = 0; c < lap.size(); ++c) {
        CHECK(std::abs(lap[c]) <= 1e-7 * std::max(1.0, std::abs(f[c])));
      }
    }
  }
}

TEST_CASE("random samples are reproducible and linear in coefficients") {
  const HarmonicSample a = random_harmonic(BallDim(3), 5, 2, 42);
  const HarmonicSample b = random_harmonic(BallDim(3), 5, 2, 42);
  const std::vector<double> x{0.1, -0.5, 0.4};
  CHECK(evaluate_harmonic(a, x) == evaluate_harmonic(b, x));
  HarmonicSample twice = a;
  for (auto& comp : twice.terms) {
    for (auto& t : comp) t.coeff *= 2.0;
  }
  const auto fa = evaluate_harmonic(a, x);
  const auto f2 = evaluate_harmonic(twice, x);
  for (std::size_t c = 0; c < fa.size(); ++c) CHECK(f2[c] == doctest::Approx(2.0 * fa[c]).epsilon(1e-14));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(random_harmonic(BallDim(4), 2, 1, 0), UnsupportedDimension);
  CHECK_THROWS_AS(random_harmonic(BallDim(2), 13, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(random_harmonic(BallDim(2), 0, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(random_harmonic(BallDim(2), 3, 0, 0), InvalidArgument);
  const HarmonicSample s = coordinate(2, 0);
  const std::vector<double> outside{0.9, 0.9};
  CHECK_THROWS_AS(evaluate_harmonic(s, outside), OutOfBall);
  CHECK_THROWS_AS(with_offset(s, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(boundary_p_norm(s, Exponent::finite(2.0), 1.5), InvalidRadius);
}

TEST_CASE("boundary norm examples") {
  const NormEstimate x3 = boundary_p_norm(coordinate(3, 2), Exponent::finite(2.0));
  CHECK(x3.converged);
  CHECK(x3.value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(boundary_p_norm(coordinate(2, 0), Exponent::finite(2.0)).value ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  for (int k : {1, 3, 7}) {
    CHECK(boundary_p_norm(single_term(2, k, 0), Exponent::finite(2.0)).value ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(boundary_p_norm(coordinate(2, 1), Exponent::finite(1.0)).value ==
        doctest::Approx(2.0 / oracle::kPi).epsilon(1e-11));
  CHECK(boundary_p_norm(coordinate(3, 2), Exponent::finite(1.0)).value ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(boundary_p_norm(coordinate(2, 0), Exponent::finite(3.0)).value ==
        doctest::Approx(std::cbrt(4.0 / (3.0 * oracle::kPi))).epsilon(1e-10));
  // Non-even p on the sphere: \int |t|^3 dsigma = 1/4.
  CHECK(boundary_p_norm(coordinate(3, 2), Exponent::finite(3.0)).value ==
        doctest::Approx(std::cbrt(0.25)).epsilon(1e-6));
  CHECK(boundary_p_norm(coordinate(3, 0), Exponent::infinity()).value ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(boundary_p_norm(single_term(2, 4, 1), Exponent::infinity()).value ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("boundary norm against a reference for a random sample") {
  const HarmonicSample s = random_harmonic(BallDim(3), 3, 1, 9);
  for (double p : {2.0, 4.0}) {
    const double ref = std::pow(sphere_mean3([&](double x, double y, double z) {
                                  const std::vector<double> v{x, y, z};
                                  return std::pow(std::abs(evaluate_harmonic(s, v)[0]), p);
                                }),
                                1.0 / p);
    CHECK(boundary_p_norm(s, Exponent::finite(p)).value == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("boundary norms are homogeneous and grow with the radius") {
  const HarmonicSample s = random_harmonic(BallDim(2), 6, 2, 17);
  HarmonicSample twice = s;
  for (auto& comp : twice.terms) {
    for (auto& t : comp) t.coeff *= 2.0;
  }
  for (const Exponent& p : {Exponent::finite(1.5), Exponent::finite(2.0), Exponent::infinity()}) {
    const double a = boundary_p_norm(s, p).value;
    CHECK(boundary_p_norm(twice, p).value == doctest::Approx(2.0 * a).epsilon(1e-9));
    CHECK(boundary_p_norm(s, p, 0.9).value <= a * (1.0 + 1e-9));
  }
}

TEST_CASE("gradient at the origin") {
  Eigen::MatrixXd M(2, 2);
  M << 1, 2, 3, 4;
  const GradientAtOrigin g = gradient_at_origin(linear_harmonic(BallDim(2), M));
  CHECK((g.jacobian - M).norm() <= 1e-13);
  // Largest singular value from the 2x2 characteristic polynomial of M^T M.
  const double tr = 30.0, det = -2.0;
  CHECK(g.operator_norm ==
        doctest::Approx(std::sqrt(0.5 * (tr + std::sqrt(tr * tr - 4.0 * det * det)))).epsilon(1e-13));
  Eigen::MatrixXd M3(1, 3);
  M3 << 0.5, -1.0, 2.0;
  const GradientAtOrigin g3 = gradient_at_origin(linear_harmonic(BallDim(3), M3));
  CHECK(g3.operator_norm == doctest::Approx(std::sqrt(5.25)).epsilon(1e-13));
  // Higher degrees do not contribute.
  CHECK(gradient_at_origin(single_term(3, 2, 1)).operator_norm == 0.0);
}

TEST_CASE("degree-one maps attain the p = 2 gradient bound") {
  for (int n : {2, 3}) {
    const InequalityCheck c = check_gradient(coordinate(n, n - 1), conjugate(2.0));
    CHECK_FALSE(c.violated);
    CHECK(c.lhs / c.rhs == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("schwarz check example") {
  const HarmonicSample s = coordinate(3, 2);
  const double norm = boundary_p_norm(s, Exponent::finite(2.0)).value;
  const double lhs = evaluate_harmonic(s, std::vector<double>{0.0, 0.0, 0.5})[0];
  const double rhs = schwarz_bound(BallPoint::on_axis(0.5, BallDim(3)), conjugate(2.0), BallDim(3), norm);
  CHECK(lhs == doctest::Approx(0.5));
  CHECK(rhs == doctest::Approx(0.638285).epsilon(1e-6));
  const BoundCheckReport rep = check_schwarz(s, conjugate(2.0), 100, 3);
  CHECK(rep.violations == 0);
  CHECK(rep.worst_slack >= 0.0);
}

TEST_CASE("table and direct checks agree") {
  const HarmonicSample s = random_harmonic(BallDim(2), 4, 2, 23);
  const BoundTable table(conjugate(3.0), BallDim(2), kTrialRadiusMax);
  const BoundCheckReport a = check_schwarz(s, conjugate(3.0), 50, 8);
  const BoundCheckReport b = check_schwarz(s, table, 50, 8);
  CHECK(a.violations == b.violations);
  CHECK(std::abs(a.worst_slack - b.worst_slack) <= 1e-9 * std::max(1.0, a.norm));
  const BoundTable wrong_dim(conjugate(3.0), BallDim(3), kTrialRadiusMax);
  CHECK_THROWS_AS(check_schwarz(s, wrong_dim, 10, 0), InvalidArgument);
  const BoundTable too_short(conjugate(3.0), BallDim(2), 0.5);
  CHECK_THROWS_AS(check_schwarz(s, too_short, 10, 0), InvalidArgument);
}

TEST_CASE("corollary equality case") {
  const InequalityCheck c = check_corollary(coordinate(3, 2), std::vector<double>{5.0});
  CHECK(std::abs(c.lhs - 1.0) <= 1e-12);
  CHECK(std::abs(c.rhs - 1.0) <= 1e-12);
  CHECK_FALSE(c.violated);
  CHECK_THROWS_AS(check_corollary(coordinate(3, 2), std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("corollary holds for random shifted samples") {
  for (int i = 0; i < 10; ++i) {
    const int n = 2 + i % 2;
    const HarmonicSample s = random_harmonic(BallDim(n), 3, 2, derive_seed(99, i));
    const InequalityCheck c = check_corollary(s, std::vector<double>{1.5 * i - 4.0, 0.7 * i});
    CHECK_FALSE(c.violated);
  }
}

TEST_CASE("monte carlo in higher dimensions") {
  std::vector<BallPoint> pts;
  for (double r : {0.2, 0.5, 0.8}) pts.push_back(BallPoint::on_axis(r, BallDim(5)));
  const auto last = [](std::span<const double> eta) { return eta.back(); };
  const MonteCarloReport rep = monte_carlo_check(BallDim(5), conjugate(2.0), last, 20000, 1, pts);
  CHECK(rep.inconclusive == 0);
  CHECK(rep.trials == 3);
  CHECK(rep.norm == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(0.05));

  const auto one = [](std::span<const double>) { return 1.0; };
  const MonteCarloReport flat = monte_carlo_check(BallDim(5), conjugate(2.0), one, 1000, 2, pts);
  CHECK(flat.inconclusive == 0);
  CHECK(flat.norm <= 1e-12);
  CHECK(flat.sample_mean == doctest::Approx(1.0));

  std::vector<BallPoint> pts6{BallPoint::on_axis(0.6, BallDim(6))};
  const auto sign = [](std::span<const double> eta) { return eta.back() > 0.0 ? 1.0 : -1.0; };
  const MonteCarloReport six = monte_carlo_check(BallDim(6), conjugate(INFINITY), sign, 20000, 3, pts6);
  CHECK(six.inconclusive == 0);
  CHECK_THROWS_AS(monte_carlo_check(BallDim(6), conjugate(2.0), sign, 1, 3, pts6), InvalidArgument);
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}
