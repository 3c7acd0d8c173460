#include "reidtk/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "reidtk/error.hpp"

namespace reidtk::evalkit {

void SampleLabels::validate() const {
  if (pids.size() != camids.size()) throw DataError("pid and camid columns differ in length");
  for (std::size_t i = 0; i < pids.size(); ++i) {
    if (pids[i] < 0 || camids[i] < 0) throw DataError("negative label at sample " + std::to_string(i));
  }
}

std::vector<std::size_t> rank_gallery(std::span<const double> row) {
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (std::isnan(row[j])) throw DataError("NaN distance at gallery index " + std::to_string(j));
  }
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  return order;
}

std::optional<double> average_precision(std::span<const std::uint8_t> ranked_matches) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < ranked_matches.size(); ++t) {
    if (!ranked_matches[t]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(t + 1);
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

EvalReport evaluate(const DistanceMatrix& d, const SampleLabels& query, const SampleLabels& gallery,
                    std::size_t max_rank) {
  query.validate();
  gallery.validate();
  if (d.rows() != query.size() || d.cols() != gallery.size()) {
    throw DataError("distance matrix is " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                    " but labels describe " + std::to_string(query.size()) + " queries and " +
                    std::to_string(gallery.size()) + " gallery samples");
  }
  if (max_rank < 1) throw ConfigError("max rank must be >= 1");
  const std::size_t ranks = std::min(max_rank, d.cols());

  EvalReport report;
  std::vector<double> cmc_hits(ranks, 0.0);
  double ap_sum = 0.0;
  std::vector<std::uint8_t> matches;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto order = rank_gallery(d.row(i));
    matches.clear();
    for (std::size_t g : order) {
      const bool same_pid = gallery.pids[g] == query.pids[i];
      if (same_pid && gallery.camids[g] == query.camids[i]) continue;
      matches.push_back(same_pid ? 1 : 0);
    }
    const auto ap = average_precision(matches);
    if (!ap) {
      ++report.excluded_queries;
      continue;
    }
    ++report.valid_queries;
    ap_sum += *ap;
    const auto first = static_cast<std::size_t>(std::find(matches.begin(), matches.end(), 1) - matches.begin());
    for (std::size_t r = first; r < ranks; ++r) cmc_hits[r] += 1.0;
  }
  if (report.valid_queries == 0) throw DataError("no query has a cross-camera positive in the gallery");

  const auto valid = static_cast<double>(report.valid_queries);
  report.cmc.resize(ranks);
  for (std::size_t r = 0; r < ranks; ++r) report.cmc[r] = cmc_hits[r] / valid;
  report.mean_ap = ap_sum / valid;
  return report;
}

}  // namespace reidtk::evalkit
