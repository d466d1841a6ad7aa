#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "ibd/diffusion.hpp"
#include "ibd/error.hpp"
#include "ibd/rng.hpp"
#include "ibd/spectral.hpp"
#include "test_support.hpp"

using namespace ibd;
using ibd::testing::mat;
using ibd::testing::vec;

namespace {

// Σ' = AΣ + ΣAᵀ + 2I from Σ(0) = 0, classical RK4 with a fine step.
Matrix lyapunov_ode(const Matrix& a, double t, int steps) {
  const long n = a.rows();
  const Matrix two = 2.0 * Matrix::Identity(n, n);
  auto f = [&](const Matrix& s) -> Matrix { return a * s + s * a.transpose() + two; };
  Matrix s = Matrix::Zero(n, n);
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const Matrix k1 = f(s);
    const Matrix k2 = f(s + 0.5 * h * k1);
    const Matrix k3 = f(s + 0.5 * h * k2);
    const Matrix k4 = f(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

Matrix random_matrix(int n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("DriftMatrix") {
  const Graph g = path_graph(2);
  const auto birth = validate_interaction(g, mat({{0.5, 1.0}, {0.25, 0.0}}));
  const auto death = validate_interaction(g, mat({{1.5, 0.5}, {-0.25, 1.0}}));
  const DriftMatrix a(birth, death);
  CHECK((a.a() - mat({{-1.0, 0.5}, {0.5, -1.0}})).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.alpha() == vec({-1.0, -1.0}));
  CHECK(a.negated() == -a.a());
  CHECK(a.symmetric());
  CHECK_FALSE(DriftMatrix(mat({{0, 1}, {0, 0}})).symmetric());
  CHECK_THROWS_AS(DriftMatrix(Matrix::Zero(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(DriftMatrix(Matrix(0, 0)), DimensionMismatch);
}

TEST_CASE("drift") {
  CHECK(drift(DriftMatrix(mat({{-1, 2}, {3, 4}})), Vector::Zero(2)) == Vector::Zero(2));
  CHECK(drift(DriftMatrix(-Matrix::Identity(2, 2)), vec({1, 2})) == vec({-1, -2}));
  CHECK(drift(DriftMatrix(mat({{-1, 0.5}, {0.5, -1}})), vec({2, 0})) == vec({-2, 1}));
  CHECK_THROWS_AS(drift(DriftMatrix(-Matrix::Identity(2, 2)), vec({1, 2, 3})), DimensionMismatch);

  // Componentwise b(x,u) - d(x,u) for the originating pair.
  std::mt19937_64 rng(8);
  const Graph g = ibd::testing::random_graph(5, 0.4, rng);
  const Matrix b = ibd::testing::random_pattern(g, 1.0, false, rng);
  const Matrix d = ibd::testing::random_pattern(g, 1.0, false, rng);
  const DriftMatrix a(validate_interaction(g, b), validate_interaction(g, d));
  const Vector u = vec({0.3, -1.2, 2.0, 0.0, 0.7});
  const Vector got = drift(a, u);
  for (int x = 0; x < 5; ++x) {
    double bx = 0.0, dx = 0.0;
    for (int y = 0; y < 5; ++y) {
      bx += b(x, y) * u(y);
      dx += d(x, y) * u(y);
    }
    CHECK(got(x) == doctest::Approx(bx - dx).epsilon(1e-14));
  }
}

TEST_CASE("euler_maruyama without noise") {
  const DriftMatrix a(mat({{-1.0}}));
  const auto path = euler_maruyama(a, vec({1.0}), 1e-3, 2.0, 1, false);
  CHECK(path.times.front() == 0.0);
  CHECK(path.times.back() == 2.0);
  CHECK(path.times.size() == 2001);
  CHECK(std::abs(path.states.back()(0) - std::exp(-2.0)) < 2e-3);

  auto terminal_error = [&](double dt) {
    return std::abs(euler_maruyama(a, vec({1.0}), dt, 1.0, 1, false).states.back()(0) -
                    std::exp(-1.0));
  };
  for (double dt : {0.01, 0.005, 0.0025}) {
    const double ratio = terminal_error(dt) / terminal_error(dt / 2);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
  }

  // Shorter final step, then stride.
  const auto ragged = euler_maruyama(a, vec({1.0}), 0.3, 1.0, 1, false);
  CHECK(ragged.times.size() == 5);
  CHECK(ragged.times[3] == doctest::Approx(0.9));
  CHECK(ragged.times[4] == 1.0);
  CHECK(ragged.states[4](0) == doctest::Approx(std::pow(0.7, 3) * 0.9).epsilon(1e-14));
  const auto strided = euler_maruyama(a, vec({1.0}), 0.1, 1.0, 1, false, 3);
  CHECK(strided.times.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
  CHECK(strided.states.back()(0) == doctest::Approx(std::pow(0.9, 10)).epsilon(1e-12));

  CHECK_THROWS_AS(euler_maruyama(a, vec({1.0}), 2.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(euler_maruyama(a, vec({1.0}), 0.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(euler_maruyama(a, vec({1.0, 2.0}), 0.1, 1.0, 1), DimensionMismatch);
}

TEST_CASE("euler_maruyama with noise") {
  const auto p1 = euler_maruyama(DriftMatrix(mat({{-0.5}})), vec({1.0}), 0.01, 1.0, 42);
  const auto p2 = euler_maruyama(DriftMatrix(mat({{-0.5}})), vec({1.0}), 0.01, 1.0, 42);
  CHECK(p1.states.back() == p2.states.back());

  // Zero drift: u(1) = √2 W(1), variance 2.
  const DriftMatrix zero(mat({{0.0}}));
  const int reps = 4000;
  Rng rng = make_rng(5);
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < reps; ++k) {
    const double v = euler_maruyama_terminal(zero, vec({0.0}), 0.05, 1.0, rng)(0);
    s += v;
    s2 += v * v;
  }
  const double var = s2 / reps - (s / reps) * (s / reps);
  // Var of the sample variance of a Gaussian: 2σ⁴/(N-1).
  CHECK(std::abs(var - 2.0) < 4.0 * std::sqrt(2.0 * 4.0 / (reps - 1)));
}

TEST_CASE("exact_transition examples") {
  const DriftMatrix a(mat({{-1, 0.5}, {0.2, -2}}));
  const auto at0 = exact_transition(a, vec({1, -1}), 0.0);
  CHECK(at0.mean == vec({1, -1}));
  CHECK(at0.covariance == Matrix::Zero(2, 2));

  const auto brownian = exact_transition(DriftMatrix(Matrix::Zero(3, 3)), vec({1, 2, 3}), 1.0);
  CHECK(brownian.mean == vec({1, 2, 3}));
  CHECK((brownian.covariance - 2.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  for (double rate : {0.5, 1.0, 3.0}) {
    for (double t : {0.1, 1.0, 20.0}) {
      const auto ou = exact_transition(DriftMatrix(mat({{-rate}})), vec({2.0}), t);
      CHECK(ou.mean(0) == doctest::Approx(2.0 * std::exp(-rate * t)).epsilon(1e-12));
      CHECK(ou.covariance(0, 0) ==
            doctest::Approx((1.0 - std::exp(-2.0 * rate * t)) / rate).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(exact_transition(a, vec({1, -1}), -1.0), ValidationError);
  CHECK_THROWS_AS(exact_transition(a, vec({1, -1}), 200.0, 1e-15, 2), QuadratureNotConverged);
}

TEST_CASE("exact_transition matches independent oracles for non-symmetric A") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix am = random_matrix(n, 1.0, rng) - 0.5 * Matrix::Identity(n, n);
    const Vector u0 = Vector::LinSpaced(n, -1.0, 2.0);
    const double t = 0.5 + 0.25 * trial;
    const auto law = exact_transition(DriftMatrix(am), u0, t);

    const Vector mean_ref = (am * t).exp() * u0;
    CHECK((law.mean - mean_ref).norm() < 1e-9 * std::max(1.0, mean_ref.norm()));

    const Matrix cov_ref = lyapunov_ode(am, t, 4000);
    CHECK((law.covariance - cov_ref).norm() / cov_ref.norm() < 1e-7);

    CHECK(asymmetry(law.covariance) < 1e-12 * std::max(1.0, law.covariance.norm()));
    CHECK(eigen_sym(0.5 * (law.covariance + law.covariance.transpose())).front() > -1e-10);
  }
}

TEST_CASE("stationary_gaussian") {
  const auto unit = stationary_gaussian(DriftMatrix(-Matrix::Identity(3, 3)));
  CHECK(unit.mean == Vector::Zero(3));
  CHECK((unit.covariance - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  const auto pair = stationary_gaussian(DriftMatrix(mat({{-2, 1}, {1, -2}})));
  CHECK((pair.covariance - mat({{2, 1}, {1, 2}}) / 3.0).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(stationary_gaussian(DriftMatrix(mat({{1.0}}))), NotHurwitz);
  CHECK_THROWS_AS(stationary_gaussian(DriftMatrix(mat({{0, 1}, {-1, 0}}))), NotHurwitz);
}

TEST_CASE("stationary law: Lyapunov residual and large-time limit") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 1 + trial % 5;
    const bool symmetric = trial % 2 == 0;
    Matrix am = random_matrix(n, 1.0, rng);
    if (symmetric) am = (0.5 * (am + am.transpose())).eval();
    // Shift into the Hurwitz region.
    am -= (spectral_abscissa(am) + 0.3) * Matrix::Identity(n, n);
    const DriftMatrix a(am);
    REQUIRE(is_hurwitz(a));

    const auto law = stationary_gaussian(a);
    CHECK(lyapunov_residual(a, law.covariance) < 1e-9);

    const double t = 50.0 / std::abs(spectral_abscissa(am));
    const Matrix late = exact_transition(a, Vector::Zero(n), t).covariance;
    CHECK((late - law.covariance).norm() / law.covariance.norm() < 1e-6);
  }
}

TEST_CASE("Euler-Maruyama moments match the exact transition law") {
  const DriftMatrix a(mat({{-1.0, 0.4}, {0.1, -0.7}}));
  const Vector u0 = vec({1.0, -0.5});
  const double t = 1.0;
  const auto law = exact_transition(a, u0, t);

  const int reps = 4000;
  std::vector<Vector> samples;
  Rng rng = make_rng(123);
  for (int k = 0; k < reps; ++k) samples.push_back(euler_maruyama_terminal(a, u0, 1e-3, t, rng));

  Vector mean = Vector::Zero(2);
  for (const auto& s : samples) mean += s;
  mean /= reps;
  for (int i = 0; i < 2; ++i) {
    double var = 0.0;
    for (const auto& s : samples) var += (s(i) - mean(i)) * (s(i) - mean(i));
    var /= reps - 1;
    CHECK(std::abs(mean(i) - law.mean(i)) < 4.0 * std::sqrt(var / reps));
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      std::vector<double> prod;
      for (const auto& s : samples) prod.push_back((s(i) - mean(i)) * (s(j) - mean(j)));
      double m = 0.0;
      for (double p : prod) m += p;
      m /= reps;
      double v = 0.0;
      for (double p : prod) v += (p - m) * (p - m);
      v /= reps - 1;
      CHECK(std::abs(m - law.covariance(i, j)) < 4.0 * std::sqrt(v / reps));
    }
  }
}

TEST_CASE("stationary log-density") {
  const DriftMatrix unit(-Matrix::Identity(2, 2));
  CHECK(stationary_log_density_unnormalized(unit, vec({0, 0})) == 0.0);
  CHECK(stationary_log_density_unnormalized(unit, vec({1, 1})) == -1.0);
  CHECK_THROWS_AS(stationary_log_density_unnormalized(DriftMatrix(mat({{-1, 1}, {0, -1}})),
                                                      vec({1, 1})),
                  AsymmetricA);

  // ∇ ½(Au,u) = Au by central differences.
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    Matrix am = random_matrix(n, 1.0, rng);
    am = (0.5 * (am + am.transpose())).eval();
    am -= (spectral_abscissa(am) + 0.5) * Matrix::Identity(n, n);
    const DriftMatrix a(am);
    const Vector u = Vector::LinSpaced(n, -1.0, 1.5);
    const Vector g = drift(a, u);
    const double h = 1e-5;
    for (int x = 0; x < n; ++x) {
      Vector up = u, dn = u;
      up(x) += h;
      dn(x) -= h;
      const double fd = (stationary_log_density_unnormalized(a, up) -
                         stationary_log_density_unnormalized(a, dn)) /
                        (2.0 * h);
      CHECK(std::abs(fd - g(x)) < 1e-6);
    }

    // Consistent with N(0, (-A)^{-1}): log-density differences agree.
    const Matrix prec = stationary_gaussian(a).covariance.inverse();
    const Vector v = Vector::Constant(n, 0.3);
    const double ours = stationary_log_density_unnormalized(a, u) -
                        stationary_log_density_unnormalized(a, v);
    const double ref = -0.5 * u.dot(prec * u) + 0.5 * v.dot(prec * v);
    CHECK(ours == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("gaussian_law_csv") {
  GaussianLaw law{vec({1.0, -2.0}), mat({{2, 0.5}, {0.5, 1}})};
  CHECK(gaussian_law_csv(law) ==
        "kind,row,col,value\nmean,0,0,1.0\nmean,1,0,-2.0\ncov,0,0,2.0\ncov,0,1,0.5\n"
        "cov,1,0,0.5\ncov,1,1,1.0\n");
}
