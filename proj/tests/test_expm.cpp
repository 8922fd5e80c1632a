#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "expm_oracle.hpp"
#include "mmcomp/closed_form.hpp"
#include "mmcomp/expm.hpp"
#include "test_support.hpp"

using namespace mmcomp;

namespace {

double max_rel_error(const Matrix& got, const testing::LongMatrix& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.rows(); ++i)
    for (Eigen::Index j = 0; j < got.cols(); ++j) {
      const long double w = want(i, j);
      const long double d = std::fabs(static_cast<long double>(got(i, j)) - w);
      worst = std::max(worst, static_cast<double>(w == 0.0L ? d : d / std::fabs(w)));
    }
  return worst;
}

Matrix random_matrix(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("expm of zero is the identity", "[expm]") {
  for (int n : {1, 2, 7, 41}) CHECK(expm(Matrix::Zero(n, n)) == Matrix::Identity(n, n));
}

TEST_CASE("expm of a diagonal matrix exponentiates the diagonal", "[expm]") {
  Vector d(5);
  d << -3.0, -0.5, 0.0, 1.25, 4.0;
  const Matrix e = expm(d.asDiagonal().toDenseMatrix());
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == j)
        CHECK(e(i, j) == Catch::Approx(std::exp(d(i))).epsilon(1e-14));
      else
        CHECK(e(i, j) == 0.0);
    }
}

TEST_CASE("expm matches the Taylor oracle on small random matrices", "[expm][oracle]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_matrix(rng, 3, -2.0, 2.0);
    CHECK(max_rel_error(expm(m), testing::taylor_expm(m)) <= 1e-10);
  }
}

TEST_CASE("expm matches the Taylor oracle on the inventory generator", "[expm][oracle]") {
  const Matrix a = build_generator(testing::study_params());
  for (double s : {0.01, 0.5, 1.0, 2.0}) {
    const Matrix m = a * s;
    CHECK(max_rel_error(expm(m), testing::taylor_expm(m)) <= 1e-10);
  }
}

TEST_CASE("expm rejects non-square and non-finite input", "[expm][errors]") {
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(expm(Matrix(0, 0)), std::invalid_argument);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expm(m), std::invalid_argument);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(expm(m), std::invalid_argument);
}

TEST_CASE("expm_action applies exp(M s) to a vector", "[expm]") {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  Vector v(2);
  v << 1.0, 1.0;
  CHECK(expm_action(m, v, 0.0) == v);
  const Vector r = expm_action(m, v, std::log(2.0));
  CHECK(r(0) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(r(1) == Catch::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(expm_action(m, Vector::Ones(3), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(expm_action(m, v, -0.1), std::invalid_argument);
}

TEST_CASE("expm_action on the 5-state generator agrees with expm", "[expm]") {
  const Matrix a = build_generator(testing::small_params(2));
  const Vector v = terminal_vector(testing::small_params(2));
  for (double s : {0.1, 0.37, 1.0}) {
    const Vector got = expm_action(a, v, s);
    const Vector want = expm(a * s) * v;
    for (int i = 0; i < 5; ++i) CHECK(got(i) == Catch::Approx(want(i)).epsilon(1e-9));
  }
}

TEST_CASE("ExpmStepper reproduces the action on a uniform grid", "[expm]") {
  const Matrix a = build_generator(testing::study_params());
  const Vector v = terminal_vector(testing::study_params());
  const ExpmStepper stepper(a, 0.001);
  const Vector stepped = stepper.apply(v, 500);
  const Vector direct = expm_action(a, v, 0.5);
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(stepped(i) == Catch::Approx(direct(i)).epsilon(1e-9));
  CHECK_THROWS_AS(ExpmStepper(a, 0.0), std::invalid_argument);
}

TEST_CASE("expm_action has the semigroup property", "[expm][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix m = random_matrix(rng, 6, -1.5, 1.5);
    const Vector v = random_matrix(rng, 6, -1.0, 1.0).col(0);
    const double s = u(rng), t = u(rng);
    const Vector once = expm_action(m, v, s + t);
    const Vector twice = expm_action(m, expm_action(m, v, t), s);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(once(i) - twice(i)) <= 1e-8 * std::max(1.0, std::abs(once(i))));
  }
}

TEST_CASE("expm_action keeps positive vectors positive for Metzler matrices", "[expm][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> off(0.0, 3.0), diag(-8.0, 2.0), pos(0.01, 2.0), time(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 12;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = i == j ? diag(rng) : off(rng);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = pos(rng);
    const Vector r = expm_action(m, v, time(rng));
    CHECK((r.array() > 0.0).all());
  }
}
