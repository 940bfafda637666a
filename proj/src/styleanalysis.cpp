#include "alphacomb/styleanalysis.hpp"

#include <cmath>

namespace alphacomb {

Vector flatten_offdiag(const Matrix& psi) {
  const Index n = psi.rows();
  if (n < 2 || psi.cols() != n) throw ValidationError("flatten_offdiag: need a square N >= 2 matrix");
  const double scale = std::max(1.0, psi.cwiseAbs().maxCoeff());
  if ((psi - psi.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError("flatten_offdiag: matrix is not symmetric");
  Vector out(n * (n - 1) / 2);
  Index a = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) out[a++] = psi(i, j);
  return out;
}

std::pair<Index, Index> offdiag_index(Index a, Index n) {
  for (Index j = 0; j < n; ++j) {
    const Index len = n - 1 - j;
    if (a < len) return {j + 1 + a, j};
    a -= len;
  }
  throw ValidationError("offdiag_index: position out of range");
}

StyleTensors style_tensors(const Vector& nu) {
  const Index n = nu.size();
  if (std::abs(nu.sum()) > 1e-9 * std::max<double>(1, n) * std::max(1.0, nu.cwiseAbs().maxCoeff()))
    throw ValidationError("style_tensors: nu must have zero mean");
  StyleTensors t;
  const Index len = n * (n - 1) / 2;
  t.x = Vector::Ones(len);
  t.y.resize(len);
  t.z.resize(len);
  Index a = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      t.y[a] = nu[j] + nu[i];
      t.z[a] = nu[i] * nu[j];
      ++a;
    }
  }
  return t;
}

StyleRegressionReport style_regression(const Vector& psi_a, const Vector& y_a, const Vector& z_a) {
  const Index len = psi_a.size();
  if (y_a.size() != len || z_a.size() != len)
    throw ValidationError("style_regression: column lengths differ");
  if (len < 4) throw ValidationError("style_regression: need at least 4 points");

  Matrix design(len, 3);
  design.col(0).setOnes();
  design.col(1) = y_a;
  design.col(2) = z_a;

  const Matrix xtx = design.transpose() * design;
  Eigen::LDLT<Matrix> ldlt(xtx);
  const Vector d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 0.0) || d.maxCoeff() / d.minCoeff() > 1e12)
    throw NumericError("style_regression: collinear y and z columns");

  StyleRegressionReport rep;
  rep.n_points = len;
  rep.coefficients = ldlt.solve(design.transpose() * psi_a);
  const Vector resid = psi_a - design * rep.coefficients;

  const double ssr = resid.squaredNorm();
  const double sst = (psi_a.array() - psi_a.mean()).square().sum();
  rep.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  const Index p = 2;  // slope count
  const Index dof = len - p - 1;
  rep.adjusted_r_squared = 1.0 - (1.0 - rep.r_squared) * double(len - 1) / double(dof);
  const double sigma_sq = ssr / double(dof);
  const Matrix cov = sigma_sq * xtx.inverse();
  rep.standard_errors = cov.diagonal().cwiseSqrt();
  rep.t_statistics.resize(3);
  for (Index c = 0; c < 3; ++c)
    rep.t_statistics[c] =
        rep.standard_errors[c] > 0.0 ? rep.coefficients[c] / rep.standard_errors[c]
                                     : std::numeric_limits<double>::infinity();
  rep.f_statistic = rep.r_squared < 1.0
                        ? (rep.r_squared / double(p)) / ((1.0 - rep.r_squared) / double(dof))
                        : std::numeric_limits<double>::infinity();
  return rep;
}

FigureColumns figure_projection(const Vector& psi_a, const Vector& y_a, const Vector& z_a,
                                const StyleRegressionReport& report) {
  FigureColumns out;
  out.w = report.coefficients[1] * y_a + report.coefficients[2] * z_a;
  out.psi_demeaned = psi_a.array() - psi_a.mean();
  return out;
}

}  // namespace alphacomb
