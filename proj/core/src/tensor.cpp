#include "reidtk/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "reidtk/error.hpp"

namespace reidtk::tensor {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap as_eigen(const Matrix& m) { return ConstMap(m.values().data(), m.rows(), m.cols()); }
MutMap as_eigen(Matrix& m) { return MutMap(m.values().data(), m.rows(), m.cols()); }

std::vector<double> row_sq_norms(const Matrix& m) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) s += v * v;
    out[i] = s;
  }
  return out;
}

// Runs body(t) for t in [0, count) on up to hardware_concurrency workers.
// Tasks are assigned round-robin, so which worker runs a tile never changes
// what the tile computes.
template <typename Body>
void parallel_tiles(std::size_t count, Body&& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count);
  if (workers <= 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < count; t += workers) body(t);
    });
  }
}

// out tile = clamp0(na_i + nb_j - 2 a_i . b_j)
void fill_tile(ConstMap a, ConstMap b, const std::vector<double>& na, const std::vector<double>& nb,
               MutMap out, std::size_t i0, std::size_t bi, std::size_t j0, std::size_t bj) {
  auto tile = out.block(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(j0),
                        static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(bj));
  tile.noalias() = a.middleRows(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(bi)) *
                   b.middleRows(static_cast<Eigen::Index>(j0), static_cast<Eigen::Index>(bj)).transpose();
  for (std::size_t r = 0; r < bi; ++r) {
    for (std::size_t c = 0; c < bj; ++c) {
      double& v = tile(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      v = std::max(0.0, na[i0 + r] + nb[j0 + c] - 2.0 * v);
    }
  }
}

void check_block(std::size_t block) {
  if (block == 0) throw ConfigError("distance block size must be >= 1");
}

}  // namespace

FeatureMatrix l2_normalize_rows(const FeatureMatrix& m) {
  if (const std::size_t bad = m.first_non_finite_row(); bad != m.rows()) {
    throw DataError("non-finite value in feature row " + std::to_string(bad));
  }
  return FeatureMatrix(normalize_rows(m));
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double s = 0.0;
    for (double v : r) s += v * v;
    if (s == 0.0) continue;
    const double norm = std::sqrt(s);
    for (double& v : r) v /= norm;
  }
  return out;
}

DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t block) {
  check_block(block);
  if (a.dim() != b.dim()) {
    throw ConfigError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  if (&a == &b || a == b) return pairwise_sq_euclidean(a, block);

  DistanceMatrix out(a.rows(), b.rows(), /*squared=*/true);
  if (out.empty()) return out;
  const auto na = row_sq_norms(a);
  const auto nb = row_sq_norms(b);
  const auto ea = as_eigen(a);
  const auto eb = as_eigen(b);
  auto eo = as_eigen(out);
  const std::size_t row_tiles = (a.rows() + block - 1) / block;
  parallel_tiles(row_tiles, [&](std::size_t t) {
    const std::size_t i0 = t * block;
    const std::size_t bi = std::min(block, a.rows() - i0);
    for (std::size_t j0 = 0; j0 < b.rows(); j0 += block) {
      fill_tile(ea, eb, na, nb, eo, i0, bi, j0, std::min(block, b.rows() - j0));
    }
  });
  return out;
}

DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& a, std::size_t block) {
  check_block(block);
  const std::size_t n = a.rows();
  DistanceMatrix out(n, n, /*squared=*/true);
  if (out.empty()) return out;
  const auto norms = row_sq_norms(a);
  const auto ea = as_eigen(a);
  auto eo = as_eigen(out);
  const std::size_t tiles = (n + block - 1) / block;
  parallel_tiles(tiles, [&](std::size_t t) {
    const std::size_t i0 = t * block;
    const std::size_t bi = std::min(block, n - i0);
    for (std::size_t j0 = i0; j0 < n; j0 += block) {
      const std::size_t bj = std::min(block, n - j0);
      fill_tile(ea, ea, norms, norms, eo, i0, bi, j0, bj);
      // Mirror the upper part of this tile into the lower triangle.
      for (std::size_t r = 0; r < bi; ++r) {
        for (std::size_t c = 0; c < bj; ++c) {
          const std::size_t i = i0 + r;
          const std::size_t j = j0 + c;
          if (j < i) continue;
          if (j == i) {
            out(i, i) = 0.0;
          } else {
            out(j, i) = out(i, j);
          }
        }
      }
    }
  });
  return out;
}

DistanceMatrix sqrt_distances(DistanceMatrix d) {
  for (double& v : d.values()) v = std::sqrt(v);
  d.set_squared(false);
  return d;
}

std::vector<std::size_t> TopKResult::indices(std::size_t row) const {
  std::vector<std::size_t> out;
  out.reserve(rows.at(row).size());
  for (const auto& n : rows[row]) out.push_back(n.index);
  return out;
}

std::vector<Neighbor> smallest_in_row(std::span<const double> row, std::size_t k, std::size_t skip) {
  std::vector<std::size_t> idx;
  idx.reserve(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j != skip) idx.push_back(j);
  }
  const std::size_t take = std::min(k, idx.size());
  const auto less = [&](std::size_t x, std::size_t y) {
    return row[x] < row[y] || (row[x] == row[y] && x < y);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), less);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t t = 0; t < take; ++t) out.push_back({idx[t], row[idx[t]]});
  return out;
}

TopKResult topk_smallest(const DistanceMatrix& d, std::size_t k, bool exclude_self) {
  const bool square = d.rows() == d.cols();
  TopKResult out;
  out.rows.reserve(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const std::size_t skip = (exclude_self && square) ? i : d.cols();
    out.rows.push_back(smallest_in_row(d.row(i), k, skip));
  }
  return out;
}

TopKResult topk_nearest(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t k, std::size_t block) {
  check_block(block);
  if (a.dim() != b.dim()) {
    throw ConfigError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const bool self = &a == &b;
  TopKResult out;
  out.rows.resize(a.rows());
  for (std::size_t i0 = 0; i0 < a.rows(); i0 += block) {
    const std::size_t bi = std::min(block, a.rows() - i0);
    const FeatureMatrix tile(a.slice_rows(i0, bi));
    DistanceMatrix slab = pairwise_sq_euclidean(tile, b, block);
    for (std::size_t r = 0; r < bi; ++r) {
      if (self) slab(r, i0 + r) = 0.0;
      out.rows[i0 + r] = smallest_in_row(slab.row(r), k, slab.cols());
    }
  }
  return out;
}

}  // namespace reidtk::tensor
