#pragma once

#include <functional>

#include "alphacomb/common.hpp"

namespace alphacomb {

// Row ranges are split into fixed-size blocks independent of the worker
// count. Workers claim blocks through an atomic cursor; per-block partial
// results are combined sequentially in block order afterwards, so sums are
// bit-identical for any thread count.

constexpr Index kReductionBlock = 8192;

/// Number of fixed blocks covering n rows.
Index block_count(Index n, Index block = kReductionBlock);

/// Runs fn(block_index, begin, end) over every block, possibly from worker
/// threads. fn must only write to state owned by its block index.
void for_each_block(Index n, const std::function<void(Index, Index, Index)>& fn,
                    Index block = kReductionBlock);

/// Upsilon = L^T L, accumulated blockwise in deterministic order.
Matrix blocked_gram(const Eigen::Ref<const RowMatrix>& l);

/// L^T diag(z) L.
Matrix blocked_weighted_gram(const Eigen::Ref<const RowMatrix>& l, const Vector& z);

/// L^T (z .* v); pass z of size 0 for unit weights.
Vector blocked_tprod(const Eigen::Ref<const RowMatrix>& l, const Vector& v, const Vector& z);

}  // namespace alphacomb
