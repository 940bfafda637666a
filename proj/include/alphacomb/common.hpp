#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace alphacomb {

using Matrix = Eigen::MatrixXd;
// Panels are stored row-major so per-alpha passes are contiguous scans.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised on malformed input files or cells.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when data violates a domain invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by numeric kernels (singular designs, failed factorizations).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Maximum N at which O(N^2) verification paths may run. Defaults to 4000,
/// overridable via the ALPHACOMB_DENSE_CAP environment variable or
/// set_dense_cap().
Index dense_cap();
void set_dense_cap(Index cap);

/// Worker count for the blocked row-parallel kernels. Results are
/// bit-identical for any value (see parallel.hpp).
int num_threads();
void set_num_threads(int n);

/// Refuses dense N x N work above the cap.
void require_dense_cap(Index n, const char* what);

}  // namespace alphacomb
