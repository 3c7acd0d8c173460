#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "reidtk/matrix.hpp"

/// Feature enhancement by aggregating multi-order nearest-neighbor context.
///
/// Pipeline for a feature matrix F (one sample per row):
///   1. unsquared Euclidean distances D between all samples;
///   2. order-1 neighbors: the k1 nearest other samples;
///      order-h neighbors: union of the order-1 lists of the order-(h-1)
///      neighbors, minus the sample itself;
///   3. Gaussian weights exp(-D^2 / (2 sigma_h^2)) on each order's support,
///      with sigma_h = sigma * 1.5^h;
///   4. latent features sum_h alpha_h * W_h F;
///   5. row-normalized gamma * F + (1 - gamma) * latent.
namespace reidtk::dmon {

enum class SigmaMode { kFixed, kAdaptive };

struct DmonConfig {
  std::size_t k1 = 2;
  std::size_t orders = 3;
  double gamma = 0.75;
  SigmaMode sigma_mode = SigmaMode::kAdaptive;
  double sigma = 1.0;
  /// Per-order decay. Empty means the default 1, 0.5, 0.25, ...
  std::vector<double> alphas;
  bool normalize_weight_rows = true;
  bool disjoint_orders = false;
  /// Rows per independently enhanced chunk; 0 means a single chunk.
  std::size_t batch_size = 0;

  /// alphas if set, else the first `orders` default decays.
  std::vector<double> effective_alphas() const;
  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// levels[h - 1][x] is the ordered, duplicate-free order-h neighbor list of x.
struct NeighborOrders {
  std::vector<std::vector<std::vector<std::size_t>>> levels;
  /// k1 actually used after clamping to N - 1.
  std::size_t effective_k1 = 0;

  std::size_t order_count() const noexcept { return levels.size(); }
  std::size_t sample_count() const noexcept { return levels.empty() ? 0 : levels.front().size(); }
  const std::vector<std::size_t>& at(std::size_t order, std::size_t sample) const {
    return levels.at(order - 1).at(sample);
  }
};

/// Compressed sparse rows.
struct SparseRows {
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> values;

  std::size_t rows() const noexcept { return offsets.size() - 1; }
  std::span<const std::size_t> row_indices(std::size_t r) const {
    return std::span(indices).subspan(offsets[r], offsets[r + 1] - offsets[r]);
  }
  std::span<const double> row_values(std::size_t r) const {
    return std::span(values).subspan(offsets[r], offsets[r + 1] - offsets[r]);
  }
  /// Value at (r, c), zero outside the support.
  double at(std::size_t r, std::size_t c) const;
};

/// One weight map per order; order h lives at index h - 1.
struct OrderWeights {
  std::vector<SparseRows> per_order;
};

/// Order-1 neighbors from a square distance matrix (squared or not). k1 is
/// clamped to N - 1 with a warning.
NeighborOrders build_first_order(const DistanceMatrix& d, std::size_t k1);

/// Appends order h = order_count() + 1. With `disjoint`, members of any
/// lower order are dropped as well.
void expand_order(NeighborOrders& orders, bool disjoint = false);

/// Builds orders 1..H.
NeighborOrders build_orders(const DistanceMatrix& d, std::size_t k1, std::size_t orders,
                            bool disjoint = false);

/// Mean unsquared distance over all order-1 pairs; 1.0 when there are none.
double adaptive_sigma(const DistanceMatrix& d, const NeighborOrders& orders);

/// Kernel bandwidth for order h.
double order_sigma(double sigma, std::size_t order);

OrderWeights gaussian_weights(const DistanceMatrix& d, const NeighborOrders& orders, double sigma,
                              bool normalize_rows = true);

/// sum_h alphas[h - 1] * (W_h F).
FeatureMatrix latent_features(const OrderWeights& w, const FeatureMatrix& f,
                              std::span<const double> alphas);

/// Full enhancement, honouring cfg.batch_size.
FeatureMatrix enhance(const FeatureMatrix& f, const DmonConfig& cfg);

}  // namespace reidtk::dmon
