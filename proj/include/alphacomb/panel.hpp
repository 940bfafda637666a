#pragma once

#include <string>
#include <vector>

#include "alphacomb/common.hpp"

namespace alphacomb {

/// N x (M+1) panel of realized alpha returns. Column 0 holds t_1, the most
/// recent observation. Immutable after construction.
struct ReturnsPanel {
  RowMatrix returns;                      // R_is
  std::vector<std::string> alpha_ids;     // unique labels, row order
  std::vector<std::string> time_labels;   // strictly ordered, size M+1

  Index n_alphas() const { return returns.rows(); }
  Index n_obs() const { return returns.cols(); }     // M+1
  Index m() const { return returns.cols() - 1; }

  /// Enforces N >= 2, M+1 >= 3, finiteness, unique ids, no constant rows.
  void validate() const;
};

/// E_i aligned to the panel's alpha order.
struct ExpectedReturns {
  Vector values;

  void validate(Index n_alphas) const;
};

/// Sparse per-alpha, per-instrument, per-time normalized dollar positions.
/// Every (alpha, time) slice satisfies sum_A |P_iAs| = 1.
struct PositionHistory {
  struct Triplet {
    Index alpha;
    Index instrument;
    Index time;
    double value;
  };
  Index n_alphas = 0;
  Index n_instruments = 0;
  Index n_obs = 0;
  std::vector<Triplet> positions;
  std::vector<std::string> alpha_ids;
  std::vector<std::string> instrument_ids;
  std::vector<std::string> time_labels;
  Index rescale_warnings = 0;  // slices whose input |sum| differed from 1
};

/// N alpha weights with sum_i |w_i| = 1, plus the normalization eta applied.
struct WeightVector {
  Vector weights;
  double eta = 0.0;
};

/// Normalizes raw to unit absolute sum. Throws ValidationError on an
/// all-zero vector (the normalization is undefined).
WeightVector normalize_weights(const Vector& raw);

ReturnsPanel load_returns_csv(const std::string& path);
void save_returns_csv(const ReturnsPanel& panel, const std::string& path);

ExpectedReturns load_expected_csv(const std::string& path, const ReturnsPanel& panel);
void save_expected_csv(const ExpectedReturns& e, const std::vector<std::string>& alpha_ids,
                       const std::string& path);

PositionHistory load_positions(const std::string& path);

void save_weights_csv(const WeightVector& w, const std::vector<std::string>& alpha_ids,
                      const std::string& path);

}  // namespace alphacomb
