#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reidtk/matrix.hpp"

/// Dense primitives shared by the enhancement, optimization and evaluation
/// stages. All functions are pure; the blocked distance kernel may fan out
/// over row tiles, and its output does not depend on the worker count.
namespace reidtk::tensor {

inline constexpr std::size_t kDefaultBlock = 512;

/// Scales every row to unit Euclidean norm. Zero rows are returned as is.
/// Throws DataError naming the first row that holds a NaN or infinity.
FeatureMatrix l2_normalize_rows(const FeatureMatrix& m);

/// Same as l2_normalize_rows for an arbitrary matrix, without the finiteness
/// check.
Matrix normalize_rows(const Matrix& m);

/// out(i, j) = sum_t (a(i, t) - b(j, t))^2 in double precision, evaluated
/// tile by tile with `block` x `block` tiles via the expansion
/// |a|^2 + |b|^2 - 2 a.b. Rounding below zero is clamped. When `a` and `b`
/// hold the same values the result has an exact zero diagonal and is exactly
/// symmetric.
DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& a, const FeatureMatrix& b,
                                     std::size_t block = kDefaultBlock);

/// Self-distance of `a`; computes the upper triangle of tiles and mirrors it.
DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& a, std::size_t block = kDefaultBlock);

/// Element-wise square root; result flagged unsquared.
DistanceMatrix sqrt_distances(DistanceMatrix d);

struct Neighbor {
  std::size_t index;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Per-row neighbor lists, ascending by (distance, index).
struct TopKResult {
  std::vector<std::vector<Neighbor>> rows;

  std::vector<std::size_t> indices(std::size_t row) const;

  friend bool operator==(const TopKResult&, const TopKResult&) = default;
};

/// k smallest entries of one row by (value, index). `skip` names a column to
/// ignore (pass row.size() for none). k is clamped to the candidate count.
std::vector<Neighbor> smallest_in_row(std::span<const double> row, std::size_t k,
                                      std::size_t skip);

/// Row-wise smallest_in_row. With `exclude_self` on a square matrix, column i
/// is skipped for row i.
TopKResult topk_smallest(const DistanceMatrix& d, std::size_t k, bool exclude_self);

/// Top-k squared-Euclidean neighbors of every row of `a` among the rows of
/// `b`, streaming over row tiles so that only a `block` x b.rows() slab of
/// distances is ever resident.
TopKResult topk_nearest(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t k,
                        std::size_t block = kDefaultBlock);

}  // namespace reidtk::tensor
