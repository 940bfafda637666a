#include "alphacomb/riskmodel.hpp"

#include <cmath>

#include "alphacomb/parallel.hpp"

namespace alphacomb {

namespace {

/// Lower Cholesky factor of a symmetric PSD matrix, tolerating eigenvalues
/// down to -1e-10 * trace.
Matrix psd_cholesky(const Matrix& a, const char* what) {
  if (a.size() == 0) return a;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Semi-definite fallback: eigen-clip tiny negatives, refuse real ones.
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const double tol = 1e-10 * std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  if (es.eigenvalues().minCoeff() < -tol)
    throw NumericError(std::string(what) + ": matrix is indefinite beyond tolerance");
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix b = es.eigenvectors() * d.asDiagonal();
  // Return a lower-triangular factor of b b^T via Householder QR of b^T.
  Eigen::HouseholderQR<Matrix> qr(b.transpose());
  Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  return r.transpose();
}

}  // namespace

void FactorModel::validate() const {
  if (omega.rows() != n()) throw ValidationError("factor model: omega rows != N");
  if (phi.rows() != k() || phi.cols() != k())
    throw ValidationError("factor model: phi shape does not match K");
  if (k() > n()) throw ValidationError("factor model: K > N");
  if ((xi.array() <= 0.0).any()) throw ValidationError("factor model: xi must be > 0");
  if (k() > 0 && (phi - phi.transpose()).cwiseAbs().maxCoeff() >
                     1e-12 * std::max(1.0, phi.cwiseAbs().maxCoeff()))
    throw ValidationError("factor model: phi is not symmetric");
}

Matrix dense_covariance(const FactorModel& model) {
  require_dense_cap(model.n(), "dense_covariance");
  Matrix gamma = (model.xi.array().square()).matrix().asDiagonal();
  if (model.k() > 0) gamma.noalias() += model.omega * model.phi * model.omega.transpose();
  return gamma;
}

Matrix scaled_loadings(const FactorModel& model) {
  if (model.k() == 0) return Matrix(model.n(), 0);
  const Matrix chol = psd_cholesky(model.phi, "scaled_loadings");
  Matrix beta = model.omega * chol;
  beta.array().colwise() /= model.xi.array();
  return beta;
}

Matrix orthonormalize(const Eigen::Ref<const Matrix>& omega_tilde) {
  const Index k = omega_tilde.cols();
  if (k == 0) return omega_tilde;
  Matrix h = omega_tilde.transpose() * omega_tilde;
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success)
    throw NumericError("orthonormalize: columns are rank deficient");
  // Condition check on the Gram matrix via its Cholesky diagonal.
  Vector diag = Matrix(llt.matrixL()).diagonal();
  double dmax = diag.maxCoeff(), dmin = diag.minCoeff();
  if (!(dmin > 0.0) || (dmax / dmin) * (dmax / dmin) > 1e12) {
    Index worst = 0;
    diag.minCoeff(&worst);
    throw NumericError("orthonormalize: near-dependent column " + std::to_string(worst));
  }
  // Omega~ -> Omega~ (H~^T)^-1 where H~ H~^T = H.
  return llt.matrixL().transpose().solve<Eigen::OnTheRight>(omega_tilde);
}

Matrix project_fcm(const Eigen::Ref<const Matrix>& loadings, const NormalizedLoadings& y) {
  if (loadings.rows() != y.y.rows())
    throw ValidationError("project_fcm: loadings rows do not match panel N");
  if (y.variant != NormalizedLoadings::Variant::Raw)
    throw ValidationError("project_fcm requires the raw Y variant");
  const Matrix t = y.y.transpose() * loadings;           // M x K
  const Matrix phi_m = phi_kernel(y.y.cols());
  Matrix phi = t.transpose() * phi_m * t;                // K x K
  phi = 0.5 * (phi + phi.transpose().eval());
  return phi;
}

SpecificRiskReport specific_risks(const Eigen::Ref<const Matrix>& loadings, const Matrix& phi) {
  if (phi.rows() != loadings.cols() || phi.cols() != loadings.cols())
    throw ValidationError("specific_risks: phi shape does not match loadings");
  SpecificRiskReport report;
  const Index n = loadings.rows();
  report.xi_tilde_sq =
      Vector::Ones(n) - ((loadings * phi).array() * loadings.array()).rowwise().sum().matrix();
  for (Index i = 0; i < n; ++i)
    if (report.xi_tilde_sq[i] <= 0.0) report.violations.push_back(i);
  if (loadings.cols() == 1) report.kappa = phi(0, 0);
  return report;
}

K1Condition k1_sufficient_condition(const Vector& beta, const NormalizedLoadings& y) {
  if (y.variant != NormalizedLoadings::Variant::Raw)
    throw ValidationError("k1_sufficient_condition requires the raw Y variant");
  if (beta.size() != y.y.rows())
    throw ValidationError("k1_sufficient_condition: beta length does not match N");
  if (std::abs(beta.squaredNorm() - 1.0) > 1e-9)
    throw ValidationError("k1_sufficient_condition: beta must have unit norm");

  const Index n = y.y.rows();
  const Vector t = blocked_tprod(y.y, Vector::Ones(n), Vector());  // Y^T u
  const double lambda_star = (t.transpose() * phi_kernel(y.y.cols()) * t).value() / double(n);
  K1Condition cond;
  cond.lambda_star = lambda_star;
  if (lambda_star <= 0.0)
    throw NumericError("k1_sufficient_condition: lambda* <= 0, pathological row sums");
  for (Index i = 0; i < n; ++i)
    if (beta[i] * beta[i] > 1.0 / lambda_star) cond.failing.push_back(i);
  return cond;
}

FactorModel shrink_scm(const DemeanedPanel& x, const ShrinkageSpec& spec) {
  if (spec.zeta < 0.0 || spec.zeta > 1.0)
    throw ValidationError("shrinkage constant must lie in [0, 1]");
  const Index n = x.n_alphas();
  const Index m = x.m();
  const Index kt = spec.target.k();
  if (spec.target.n() != n) throw ValidationError("shrinkage target N does not match panel");

  // Target diagonal must equal the sample variances.
  const Vector var = sample_variances(x);
  Vector target_diag = spec.target.xi.array().square();
  if (kt > 0)
    target_diag += ((spec.target.omega * spec.target.phi).array() * spec.target.omega.array())
                       .rowwise()
                       .sum()
                       .matrix();
  for (Index i = 0; i < n; ++i) {
    if (std::abs(target_diag[i] - var[i]) > 1e-9 * std::max(1.0, std::abs(var[i])))
      throw ValidationError("shrinkage target diagonal does not match sample variances at row " +
                            std::to_string(i));
  }

  FactorModel out;
  out.xi = std::sqrt(spec.zeta) * spec.target.xi;
  out.omega.resize(n, kt + m);
  if (kt > 0) out.omega.leftCols(kt) = spec.target.omega;
  out.omega.rightCols(m) = x.x.leftCols(m);
  out.phi = Matrix::Zero(kt + m, kt + m);
  if (kt > 0) out.phi.topLeftCorner(kt, kt) = spec.zeta * spec.target.phi;
  out.phi.bottomRightCorner(m, m) = (1.0 - spec.zeta) * phi_kernel(m);
  return out;
}

PositionLoadings position_loadings(const PositionHistory& pos) {
  if (pos.positions.empty()) throw ValidationError("position history is empty");
  Matrix full = Matrix::Zero(pos.n_alphas, pos.n_instruments);
  for (const auto& t : pos.positions) full(t.alpha, t.instrument) += std::abs(t.value);
  full /= double(pos.n_obs);

  PositionLoadings out;
  std::vector<Index> kept;
  for (Index a = 0; a < pos.n_instruments; ++a) {
    if (full.col(a).cwiseAbs().maxCoeff() > 0.0) {
      kept.push_back(a);
    } else {
      out.dropped_columns.push_back(a);
    }
  }
  if (kept.empty()) throw ValidationError("position loadings: all instrument columns are zero");
  out.omega_tilde.resize(pos.n_alphas, static_cast<Index>(kept.size()));
  for (size_t c = 0; c < kept.size(); ++c) {
    out.omega_tilde.col(static_cast<Index>(c)) = full.col(kept[c]);
    out.instrument_ids.push_back(pos.instrument_ids[kept[c]]);
  }
  return out;
}

Matrix style_loadings(const Vector& sigma, const std::optional<Vector>& turnover,
                      const std::optional<Vector>& momentum) {
  const Index n = sigma.size();
  std::vector<std::pair<const char*, const Vector*>> inputs = {{"volatility", &sigma}};
  if (turnover) inputs.emplace_back("turnover", &*turnover);
  if (momentum) inputs.emplace_back("momentum", &*momentum);

  Matrix out(n, static_cast<Index>(inputs.size()));
  for (size_t c = 0; c < inputs.size(); ++c) {
    const Vector& v = *inputs[c].second;
    if (v.size() != n) throw ValidationError(std::string(inputs[c].first) + ": length mismatch");
    for (Index i = 0; i < n; ++i) {
      if (!(v[i] > 0.0))
        throw ValidationError(std::string(inputs[c].first) + ": nonpositive entry at index " +
                              std::to_string(i));
    }
    Vector logs = v.array().log();
    out.col(static_cast<Index>(c)) = logs.array() - logs.mean();
  }
  return out;
}

}  // namespace alphacomb
