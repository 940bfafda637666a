#include "alphacomb/stats.hpp"

#include <cmath>

#include "alphacomb/parallel.hpp"

namespace alphacomb {

DemeanedPanel serial_demean(const ReturnsPanel& panel) {
  DemeanedPanel out;
  out.x = panel.returns;
  for_each_block(out.x.rows(), [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      out.x.row(i).array() -= out.x.row(i).mean();
    }
  });
  return out;
}

Vector sample_variances(const DemeanedPanel& x) {
  const Index n = x.n_alphas();
  const Index m = x.m();
  if (m < 1) throw ValidationError("sample_variances requires M >= 1");
  Vector var(n);
  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) var[i] = x.x.row(i).squaredNorm() / double(m);
  });
  for (Index i = 0; i < n; ++i) {
    if (var[i] < 1e-300)
      throw NumericError("degenerate alpha at row " + std::to_string(i) +
                         ": sample variance underflows");
  }
  return var;
}

NormalizedLoadings normalize_and_trim(const DemeanedPanel& x, const Vector& sigma,
                                      bool remove_overall_mode) {
  const Index n = x.n_alphas();
  const Index m = x.m();
  if (sigma.size() != n) throw ValidationError("sigma length does not match panel N");
  if ((sigma.array() <= 0.0).any()) throw ValidationError("sigma must be strictly positive");
  if (remove_overall_mode && m - 1 == 0)
    throw ValidationError("insufficient observations after mode removal");

  NormalizedLoadings out;
  const Index keep = remove_overall_mode ? m - 1 : m;
  out.variant =
      remove_overall_mode ? NormalizedLoadings::Variant::Demeaned : NormalizedLoadings::Variant::Raw;
  out.y.resize(n, keep);

  if (!remove_overall_mode) {
    for_each_block(n, [&](Index, Index begin, Index end) {
      for (Index i = begin; i < end; ++i) out.y.row(i) = x.x.row(i).head(m) / sigma[i];
    });
    return out;
  }

  // Column means of Y over the first M columns, accumulated blockwise in
  // deterministic order, then demean and drop the last column.
  const Index nblocks = block_count(n);
  std::vector<Vector> partial(nblocks);
  for_each_block(n, [&](Index b, Index begin, Index end) {
    Vector acc = Vector::Zero(m);
    for (Index i = begin; i < end; ++i) acc += (x.x.row(i).head(m) / sigma[i]).transpose();
    partial[b] = std::move(acc);
  });
  Vector colmean = Vector::Zero(m);
  for (const auto& p : partial) colmean += p;
  colmean /= double(n);

  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i)
      out.y.row(i) = (x.x.row(i).head(keep) / sigma[i]) - colmean.head(keep).transpose();
  });
  return out;
}

Matrix phi_kernel(Index m) {
  Matrix phi = Matrix::Constant(m, m, 1.0 / double(m));
  phi.diagonal().array() += 1.0 / double(m);
  return phi;
}

Matrix sample_correlation_dense(const NormalizedLoadings& y) {
  if (y.variant != NormalizedLoadings::Variant::Raw)
    throw ValidationError("sample_correlation_dense requires the raw Y variant");
  require_dense_cap(y.y.rows(), "sample_correlation_dense");
  const Matrix phi = phi_kernel(y.y.cols());
  Matrix psi = y.y * phi * y.y.transpose();
  psi = 0.5 * (psi + psi.transpose());  // symmetrize roundoff
  return psi;
}

GramMatrix gram(const Eigen::Ref<const RowMatrix>& loadings) {
  if (loadings.cols() < 1) throw ValidationError("gram requires at least one column");
  GramMatrix g;
  g.upsilon = blocked_gram(loadings);
  g.upsilon = 0.5 * (g.upsilon + g.upsilon.transpose().eval());
  return g;
}

}  // namespace alphacomb
