#include "alphacomb/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace alphacomb {

Index block_count(Index n, Index block) { return (n + block - 1) / block; }

void for_each_block(Index n, const std::function<void(Index, Index, Index)>& fn, Index block) {
  const Index nblocks = block_count(n, block);
  if (nblocks <= 0) return;
  int workers = num_threads();
  if (workers <= 1 || nblocks == 1) {
    for (Index b = 0; b < nblocks; ++b) fn(b, b * block, std::min(n, (b + 1) * block));
    return;
  }
  workers = static_cast<int>(std::min<Index>(workers, nblocks));
  std::atomic<Index> cursor{0};
  auto run = [&] {
    for (;;) {
      Index b = cursor.fetch_add(1);
      if (b >= nblocks) return;
      fn(b, b * block, std::min(n, (b + 1) * block));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

Matrix blocked_gram(const Eigen::Ref<const RowMatrix>& l) {
  const Index n = l.rows(), m = l.cols();
  const Index nblocks = block_count(n);
  std::vector<Matrix> partial(nblocks);
  for_each_block(n, [&](Index b, Index begin, Index end) {
    const auto rows = l.middleRows(begin, end - begin);
    partial[b].noalias() = rows.transpose() * rows;
  });
  Matrix g = Matrix::Zero(m, m);
  for (const auto& p : partial) g += p;
  return g;
}

Matrix blocked_weighted_gram(const Eigen::Ref<const RowMatrix>& l, const Vector& z) {
  const Index n = l.rows(), m = l.cols();
  const Index nblocks = block_count(n);
  std::vector<Matrix> partial(nblocks);
  for_each_block(n, [&](Index b, Index begin, Index end) {
    const auto rows = l.middleRows(begin, end - begin);
    partial[b].noalias() =
        rows.transpose() * z.segment(begin, end - begin).asDiagonal() * rows;
  });
  Matrix g = Matrix::Zero(m, m);
  for (const auto& p : partial) g += p;
  return g;
}

Vector blocked_tprod(const Eigen::Ref<const RowMatrix>& l, const Vector& v, const Vector& z) {
  const Index n = l.rows(), m = l.cols();
  const Index nblocks = block_count(n);
  std::vector<Vector> partial(nblocks);
  for_each_block(n, [&](Index b, Index begin, Index end) {
    const auto rows = l.middleRows(begin, end - begin);
    if (z.size() == 0) {
      partial[b].noalias() = rows.transpose() * v.segment(begin, end - begin);
    } else {
      partial[b].noalias() = rows.transpose() * (z.segment(begin, end - begin).array() *
                                                 v.segment(begin, end - begin).array())
                                                    .matrix();
    }
  });
  Vector out = Vector::Zero(m);
  for (const auto& p : partial) out += p;
  return out;
}

}  // namespace alphacomb
