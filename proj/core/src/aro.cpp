#include "reidtk/aro.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "reidtk/error.hpp"

namespace reidtk::aro {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A filtered row: `fill` everywhere except at the kept columns.
struct FilteredRow {
  double norm = 0.0;           // L2 norm of the full filtered row
  double deviation_sum = 0.0;  // sum over kept columns of (value - fill)
};

FilteredRow summarize(const std::vector<tensor::Neighbor>& kept, std::size_t cols, double fill) {
  FilteredRow out;
  double sq = fill * fill * static_cast<double>(cols - kept.size());
  for (const auto& n : kept) {
    sq += n.distance * n.distance;
    out.deviation_sum += n.distance - fill;
  }
  out.norm = std::sqrt(sq);
  return out;
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void AroConfig::validate() const {
  if (k2 < 1) throw ConfigError("k2 must be >= 1");
  if (fill_value != 0.0 && fill_value != 1.0) throw ConfigError("fill value must be 0 or 1");
}

DistancePair build_distance_pair(const FeatureMatrix& fq, const FeatureMatrix& fg, std::size_t block) {
  if (fq.dim() != fg.dim()) {
    throw ConfigError("query dim " + std::to_string(fq.dim()) + " != gallery dim " + std::to_string(fg.dim()));
  }
  return {tensor::pairwise_sq_euclidean(fq, fg, block), tensor::pairwise_sq_euclidean(fg, block)};
}

DistanceMatrix neighborhood_filter(const DistanceMatrix& d, std::size_t k2, double fill) {
  if (k2 < 1) throw ConfigError("k2 must be >= 1");
  DistanceMatrix out(d.rows(), d.cols(), d.squared(), fill);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (const auto& n : tensor::smallest_in_row(d.row(i), k2, d.cols())) out(i, n.index) = n.distance;
  }
  return out;
}

DistanceMatrix asymmetric_similarity(const DistanceMatrix& dqg_f, const DistanceMatrix& dgg_f) {
  if (dgg_f.rows() != dgg_f.cols() || dqg_f.cols() != dgg_f.cols()) {
    throw ConfigError("similarity needs Nq x Ng and Ng x Ng inputs, got " + std::to_string(dqg_f.rows()) +
                      "x" + std::to_string(dqg_f.cols()) + " and " + std::to_string(dgg_f.rows()) + "x" +
                      std::to_string(dgg_f.cols()));
  }
  const Matrix q = tensor::normalize_rows(dqg_f);
  const Matrix g = tensor::normalize_rows(dgg_f);
  DistanceMatrix out(q.rows(), g.rows(), /*squared=*/false);
  if (out.empty() || q.cols() == 0) return out;
  Eigen::Map<const RowMajor> eq(q.values().data(), q.rows(), q.cols());
  Eigen::Map<const RowMajor> eg(g.values().data(), g.rows(), g.cols());
  Eigen::Map<RowMajor> eo(out.values().data(), out.rows(), out.cols());
  eo.noalias() = eq * eg.transpose();
  for (double& v : out.values()) v = clamp_unit(v);
  return out;
}

DistanceMatrix optimize(const FeatureMatrix& fq, const FeatureMatrix& fg, const AroConfig& cfg,
                        std::size_t block) {
  cfg.validate();
  if (fq.dim() != fg.dim()) {
    throw ConfigError("query dim " + std::to_string(fq.dim()) + " != gallery dim " + std::to_string(fg.dim()));
  }
  DistanceMatrix dqg = tensor::pairwise_sq_euclidean(fq, fg, block);
  if (!cfg.enabled || dqg.empty()) return dqg;

  const std::size_t ng = fg.rows();
  const double fill = cfg.fill_value;
  const auto query_kept = tensor::topk_smallest(dqg, cfg.k2, /*exclude_self=*/false);
  const auto gallery_kept = tensor::topk_nearest(fg, fg, cfg.k2, block);

  std::vector<FilteredRow> gallery_rows(ng);
  for (std::size_t g = 0; g < ng; ++g) gallery_rows[g] = summarize(gallery_kept.rows[g], ng, fill);

  // dot(q, g) = fill^2 Ng + fill (sum_q + sum_g) + sum over shared kept
  // columns of (q_j - fill)(g_j - fill)
  const double base = fill * fill * static_cast<double>(ng);
  std::vector<double> deviation(ng, 0.0);
  for (std::size_t i = 0; i < fq.rows(); ++i) {
    const auto& kept = query_kept.rows[i];
    const FilteredRow qrow = summarize(kept, ng, fill);
    for (const auto& n : kept) deviation[n.index] = n.distance - fill;
    auto out_row = dqg.row(i);
    for (std::size_t g = 0; g < ng; ++g) {
      const FilteredRow& grow = gallery_rows[g];
      double a = 0.0;
      if (qrow.norm > 0.0 && grow.norm > 0.0) {
        double shared = 0.0;
        for (const auto& n : gallery_kept.rows[g]) shared += deviation[n.index] * (n.distance - fill);
        const double dot = base + fill * (qrow.deviation_sum + grow.deviation_sum) + shared;
        a = clamp_unit(dot / (qrow.norm * grow.norm));
      }
      out_row[g] -= a;
    }
    for (const auto& n : kept) deviation[n.index] = 0.0;
  }
  dqg.set_squared(false);
  return dqg;
}

}  // namespace reidtk::aro
