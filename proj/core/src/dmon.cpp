#include "reidtk/dmon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "reidtk/error.hpp"
#include "reidtk/log.hpp"
#include "reidtk/tensor.hpp"

namespace reidtk::dmon {
namespace {

constexpr double kBandwidthGrowth = 1.5;

double squared_entry(const DistanceMatrix& d, std::size_t x, std::size_t y) {
  const double v = d(x, y);
  return d.squared() ? v : v * v;
}

FeatureMatrix enhance_chunk(const FeatureMatrix& f, const DmonConfig& cfg) {
  const DistanceMatrix dist = tensor::sqrt_distances(tensor::pairwise_sq_euclidean(f));
  const NeighborOrders orders = build_orders(dist, cfg.k1, cfg.orders, cfg.disjoint_orders);
  const double sigma =
      cfg.sigma_mode == SigmaMode::kFixed ? cfg.sigma : adaptive_sigma(dist, orders);
  const OrderWeights weights = gaussian_weights(dist, orders, sigma, cfg.normalize_weight_rows);
  const auto alphas = cfg.effective_alphas();
  const FeatureMatrix latent = latent_features(weights, f, alphas);

  Matrix fused(f.rows(), f.cols());
  const auto src = f.values();
  const auto lat = latent.values();
  auto dst = fused.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = cfg.gamma * src[i] + (1.0 - cfg.gamma) * lat[i];
  }
  return FeatureMatrix(tensor::normalize_rows(fused));
}

}  // namespace

std::vector<double> DmonConfig::effective_alphas() const {
  if (!alphas.empty()) return alphas;
  std::vector<double> out(orders);
  double a = 1.0;
  for (double& v : out) {
    v = a;
    a *= 0.5;
  }
  return out;
}

void DmonConfig::validate() const {
  if (k1 < 1) throw ConfigError("k1 must be >= 1");
  if (orders < 1) throw ConfigError("number of neighbor orders must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (sigma_mode == SigmaMode::kFixed && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw ConfigError("fixed sigma must be a positive finite number");
  }
  if (!alphas.empty() && alphas.size() < orders) {
    throw ConfigError("need at least " + std::to_string(orders) + " decay coefficients, got " +
                      std::to_string(alphas.size()));
  }
  for (double a : alphas) {
    if (!std::isfinite(a)) throw ConfigError("decay coefficients must be finite");
  }
}

double SparseRows::at(std::size_t r, std::size_t c) const {
  const auto idx = row_indices(r);
  const auto it = std::find(idx.begin(), idx.end(), c);
  return it == idx.end() ? 0.0 : row_values(r)[static_cast<std::size_t>(it - idx.begin())];
}

NeighborOrders build_first_order(const DistanceMatrix& d, std::size_t k1) {
  if (d.rows() != d.cols()) throw ConfigError("neighbor construction needs a square distance matrix");
  if (k1 < 1) throw ConfigError("k1 must be >= 1");
  const std::size_t n = d.rows();
  std::size_t k = k1;
  if (n > 0 && k1 >= n) {
    k = n - 1;
    warn("k1=" + std::to_string(k1) + " exceeds the " + std::to_string(n - 1) +
         " available neighbors; clamped to " + std::to_string(k));
  }
  const auto top = tensor::topk_smallest(d, k, /*exclude_self=*/true);
  NeighborOrders out;
  out.effective_k1 = k;
  auto& level = out.levels.emplace_back(n);
  for (std::size_t x = 0; x < n; ++x) level[x] = top.indices(x);
  return out;
}

void expand_order(NeighborOrders& orders, bool disjoint) {
  if (orders.levels.empty()) throw ConfigError("order-1 neighbors are required before expansion");
  const auto& first = orders.levels.front();
  const std::size_t n = first.size();
  std::vector<std::vector<std::size_t>> next(n);
  std::vector<std::size_t> stamp(n, n);  // stamp[y] == x marks y as excluded for sample x
  for (std::size_t x = 0; x < n; ++x) {
    stamp[x] = x;
    if (disjoint) {
      for (const auto& level : orders.levels) {
        for (std::size_t y : level[x]) stamp[y] = x;
      }
    }
    for (std::size_t y : orders.levels.back()[x]) {
      for (std::size_t z : first[y]) {
        if (stamp[z] == x) continue;
        stamp[z] = x;
        next[x].push_back(z);
      }
    }
  }
  orders.levels.push_back(std::move(next));
}

NeighborOrders build_orders(const DistanceMatrix& d, std::size_t k1, std::size_t orders, bool disjoint) {
  if (orders < 1) throw ConfigError("number of neighbor orders must be >= 1");
  NeighborOrders out = build_first_order(d, k1);
  while (out.order_count() < orders) expand_order(out, disjoint);
  return out;
}

double adaptive_sigma(const DistanceMatrix& d, const NeighborOrders& orders) {
  if (orders.levels.empty()) return 1.0;
  double sum = 0.0;
  std::size_t count = 0;
  const auto& first = orders.levels.front();
  for (std::size_t x = 0; x < first.size(); ++x) {
    for (std::size_t y : first[x]) {
      sum += std::sqrt(squared_entry(d, x, y));
      ++count;
    }
  }
  if (count == 0) return 1.0;
  const double mean = sum / static_cast<double>(count);
  // All order-1 neighbors coincide with their anchor; any positive bandwidth
  // then yields weight 1.
  return mean > 0.0 ? mean : 1.0;
}

double order_sigma(double sigma, std::size_t order) {
  return sigma * std::pow(kBandwidthGrowth, static_cast<double>(order));
}

OrderWeights gaussian_weights(const DistanceMatrix& d, const NeighborOrders& orders, double sigma,
                              bool normalize_rows) {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  const std::size_t n = orders.sample_count();
  if (d.rows() != n || d.cols() != n) throw ConfigError("distance matrix does not match neighbor sets");
  OrderWeights out;
  out.per_order.reserve(orders.order_count());
  for (std::size_t h = 1; h <= orders.order_count(); ++h) {
    const double s = order_sigma(sigma, h);
    const double denom = 2.0 * s * s;
    SparseRows w;
    w.cols = n;
    for (std::size_t x = 0; x < n; ++x) {
      const auto& nbrs = orders.at(h, x);
      const std::size_t begin = w.values.size();
      double row_sum = 0.0;
      for (std::size_t y : nbrs) {
        // Floor at the smallest normal double so the support never shrinks
        // through underflow.
        const double v = std::max(std::exp(-squared_entry(d, x, y) / denom),
                                  std::numeric_limits<double>::min());
        w.indices.push_back(y);
        w.values.push_back(v);
        row_sum += v;
      }
      if (normalize_rows && row_sum > 0.0) {
        for (std::size_t t = begin; t < w.values.size(); ++t) w.values[t] /= row_sum;
      }
      w.offsets.push_back(w.values.size());
    }
    out.per_order.push_back(std::move(w));
  }
  return out;
}

FeatureMatrix latent_features(const OrderWeights& w, const FeatureMatrix& f, std::span<const double> alphas) {
  if (alphas.size() < w.per_order.size()) {
    throw ConfigError("need " + std::to_string(w.per_order.size()) + " decay coefficients, got " +
                      std::to_string(alphas.size()));
  }
  FeatureMatrix out(f.rows(), f.cols());
  for (std::size_t h = 0; h < w.per_order.size(); ++h) {
    const SparseRows& wh = w.per_order[h];
    if (wh.rows() != f.rows() || wh.cols != f.rows()) {
      throw ConfigError("weight map shape does not match the feature matrix");
    }
    const double alpha = alphas[h];
    for (std::size_t x = 0; x < f.rows(); ++x) {
      auto dst = out.row(x);
      const auto idx = wh.row_indices(x);
      const auto val = wh.row_values(x);
      for (std::size_t t = 0; t < idx.size(); ++t) {
        const double c = alpha * val[t];
        const auto src = f.row(idx[t]);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += c * src[j];
      }
    }
  }
  return out;
}

FeatureMatrix enhance(const FeatureMatrix& f, const DmonConfig& cfg) {
  cfg.validate();
  if (f.rows() == 0 || f.dim() == 0) throw DataError("cannot enhance an empty feature matrix");
  if (const std::size_t bad = f.first_non_finite_row(); bad != f.rows()) {
    throw DataError("non-finite value in feature row " + std::to_string(bad));
  }
  if (cfg.gamma == 1.0) return tensor::l2_normalize_rows(f);

  const std::size_t n = f.rows();
  if (cfg.batch_size == 0 || cfg.batch_size >= n) return enhance_chunk(f, cfg);

  FeatureMatrix out(n, f.dim());
  for (std::size_t first = 0; first < n; first += cfg.batch_size) {
    const std::size_t count = std::min(cfg.batch_size, n - first);
    const FeatureMatrix part = enhance_chunk(FeatureMatrix(f.slice_rows(first, count)), cfg);
    std::copy(part.values().begin(), part.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(first * f.dim()));
  }
  return out;
}

}  // namespace reidtk::dmon
