#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alphacomb/styleanalysis.hpp"
#include "helpers.hpp"

using namespace alphacomb;
using namespace testutil;

namespace {

Vector zero_mean(Vector v) {
  v.array() -= v.mean();
  return v;
}

}  // namespace

TEST_CASE("flatten_offdiag ordering contract") {
  SUBCASE("N = 2") {
    Matrix psi(2, 2);
    psi << 1, 0.3, 0.3, 1;
    const Vector f = flatten_offdiag(psi);
    REQUIRE(f.size() == 1);
    CHECK(f[0] == 0.3);
  }
  SUBCASE("N = 3 is (21, 31, 32)") {
    Matrix psi = Matrix::Identity(3, 3);
    psi(1, 0) = psi(0, 1) = 0.1;
    psi(2, 0) = psi(0, 2) = 0.2;
    psi(2, 1) = psi(1, 2) = 0.3;
    const Vector f = flatten_offdiag(psi);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == 0.1);
    CHECK(f[1] == 0.2);
    CHECK(f[2] == 0.3);
  }
  SUBCASE("identity flattens to zeros") {
    CHECK(flatten_offdiag(Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("asymmetry is rejected") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(1, 0) = 0.5;
    CHECK_THROWS_AS(flatten_offdiag(bad), ValidationError);
  }
}

TEST_CASE("offdiag_index inverts the flatten ordering exhaustively") {
  for (Index n = 2; n <= 20; ++n) {
    Index a = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i) {
        const auto [pi, pj] = offdiag_index(a, n);
        CHECK(pi == i);
        CHECK(pj == j);
        ++a;
      }
    CHECK(a == n * (n - 1) / 2);
  }
}

TEST_CASE("style_tensors substitution") {
  SUBCASE("nu = (1, -1)") {
    Vector nu(2);
    nu << 1, -1;
    const StyleTensors t = style_tensors(nu);
    REQUIRE(t.y.size() == 1);
    CHECK(t.x[0] == 1.0);
    CHECK(t.y[0] == doctest::Approx(0.0));   // nu_i + nu_j
    CHECK(t.z[0] == doctest::Approx(-1.0));  // nu_i * nu_j
  }
  SUBCASE("zero nu gives zero tensors") {
    const StyleTensors t = style_tensors(Vector::Zero(4));
    CHECK(t.y.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.z.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random N = 40 matches direct construction") {
    const Vector nu = zero_mean(random_vector(40, 90));
    const StyleTensors t = style_tensors(nu);
    Index a = 0;
    for (Index j = 0; j < 40; ++j)
      for (Index i = j + 1; i < 40; ++i, ++a) {
        CHECK(t.y[a] == doctest::Approx(nu[i] + nu[j]).epsilon(1e-14));
        CHECK(t.z[a] == doctest::Approx(nu[i] * nu[j]).epsilon(1e-14));
      }
  }
  SUBCASE("non-zero-mean nu is rejected") {
    CHECK_THROWS_AS(style_tensors(Vector::Ones(4)), ValidationError);
  }
}

TEST_CASE("style_regression recovers planted coefficients exactly") {
  const Vector nu = zero_mean(random_vector(30, 91));
  const StyleTensors t = style_tensors(nu);
  const Vector psi_a = 0.1 * Vector::Ones(t.y.size()) + 0.2 * t.y + 0.3 * t.z;
  const StyleRegressionReport rep = style_regression(psi_a, t.y, t.z);
  CHECK(rep.coefficients[0] == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(rep.coefficients[1] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(rep.coefficients[2] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(rep.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.n_points == 30 * 29 / 2);
}

TEST_CASE("style_regression statistics against an independent oracle") {
  const Vector nu = zero_mean(random_vector(25, 92));
  const StyleTensors t = style_tensors(nu);
  const Index l = t.y.size();
  Vector psi_a = 0.05 * Vector::Ones(l) + 0.1 * t.y + 0.02 * t.z + 0.3 * random_vector(l, 93);
  const StyleRegressionReport rep = style_regression(psi_a, t.y, t.z);

  Matrix design(l, 3);
  design.col(0).setOnes();
  design.col(1) = t.y;
  design.col(2) = t.z;
  const Vector coef = design.completeOrthogonalDecomposition().solve(psi_a);
  CHECK(max_abs_diff(rep.coefficients, coef) < 1e-10);

  const Vector resid = psi_a - design * coef;
  // normal equations
  CHECK((design.transpose() * resid).cwiseAbs().maxCoeff() <
        1e-9 * psi_a.norm() * design.norm());
  // R^2 = 1 - SSR/SST
  const double sst = (psi_a.array() - psi_a.mean()).square().sum();
  const double r2 = 1.0 - resid.squaredNorm() / sst;
  CHECK(rep.r_squared == doctest::Approx(r2).epsilon(1e-12));
  CHECK(rep.adjusted_r_squared <= rep.r_squared);
  CHECK(rep.r_squared >= 0.0);
  CHECK(rep.r_squared <= 1.0);

  // standard errors from the usual sandwich-free formula
  const double s2 = resid.squaredNorm() / double(l - 3);
  const Matrix cov = s2 * (design.transpose() * design).inverse();
  for (int c = 0; c < 3; ++c) {
    CHECK(rep.standard_errors[c] == doctest::Approx(std::sqrt(cov(c, c))).epsilon(1e-10));
    CHECK(rep.t_statistics[c] ==
          doctest::Approx(coef[c] / std::sqrt(cov(c, c))).epsilon(1e-10));
  }
}

TEST_CASE("style_regression on pure noise has weak fit") {
  const Vector nu = zero_mean(random_vector(40, 94));
  const StyleTensors t = style_tensors(nu);
  const Vector psi_a = random_vector(t.y.size(), 95);
  const StyleRegressionReport rep = style_regression(psi_a, t.y, t.z);
  CHECK(rep.r_squared < 0.05);
}

TEST_CASE("style_regression rejects collinear tensors") {
  const Vector nu = zero_mean(random_vector(10, 96));
  const StyleTensors t = style_tensors(nu);
  const Vector psi_a = random_vector(t.y.size(), 97);
  CHECK_THROWS_AS(style_regression(psi_a, t.y, Vector(2.0 * t.y)), NumericError);
}

TEST_CASE("figure_projection") {
  const Vector nu = zero_mean(random_vector(20, 98));
  const StyleTensors t = style_tensors(nu);

  SUBCASE("perfect fit lies on the slope-1 line through the origin") {
    const Vector psi_a = -0.07 * Vector::Ones(t.y.size()) + 0.4 * t.y - 0.2 * t.z;
    const StyleRegressionReport rep = style_regression(psi_a, t.y, t.z);
    const FigureColumns fig = figure_projection(psi_a, t.y, t.z, rep);
    // exact fit: vertical = horizontal up to the constant mean(w) absorbed by
    // the intercept, i.e. the scatter is a slope-1 line
    const Vector centered = fig.w.array() - fig.w.mean();
    CHECK((fig.psi_demeaned - centered).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("zero coefficients give zero w") {
    StyleRegressionReport rep;
    rep.coefficients = Vector::Zero(3);
    const Vector psi_a = random_vector(t.y.size(), 99);
    const FigureColumns fig = figure_projection(psi_a, t.y, t.z, rep);
    CHECK(fig.w.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("demeaned column has zero mean") {
    const Vector psi_a = random_vector(t.y.size(), 100);
    const StyleRegressionReport rep = style_regression(psi_a, t.y, t.z);
    const FigureColumns fig = figure_projection(psi_a, t.y, t.z, rep);
    CHECK(std::abs(fig.psi_demeaned.mean()) < 1e-12);
  }
}
