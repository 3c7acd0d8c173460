#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reidtk/matrix.hpp"

namespace reidtk::evalkit {

struct SampleLabels {
  std::vector<std::int64_t> pids;
  std::vector<std::int64_t> camids;

  std::size_t size() const noexcept { return pids.size(); }
  void push_back(std::int64_t pid, std::int64_t camid) {
    pids.push_back(pid);
    camids.push_back(camid);
  }
  /// Throws DataError on length mismatch or negative ids.
  void validate() const;

  friend bool operator==(const SampleLabels&, const SampleLabels&) = default;
};

struct EvalReport {
  /// cmc[r - 1] is the fraction of valid queries matched within rank r.
  std::vector<double> cmc;
  double mean_ap = 0.0;
  std::size_t valid_queries = 0;
  std::size_t excluded_queries = 0;

  double rank1() const { return cmc.empty() ? 0.0 : cmc.front(); }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Gallery indices by ascending distance, ties by index. NaN is a DataError.
std::vector<std::size_t> rank_gallery(std::span<const double> row);

/// Mean of precision@t over the positions t holding a match. Empty optional
/// when there is no match at all.
std::optional<double> average_precision(std::span<const std::uint8_t> ranked_matches);

/// Market-1501 style evaluation: per query, gallery samples sharing both pid
/// and camid with it are dropped before scoring; queries left without any
/// positive are excluded and counted. The CMC is truncated to
/// min(max_rank, Ng) ranks.
EvalReport evaluate(const DistanceMatrix& d, const SampleLabels& query, const SampleLabels& gallery,
                    std::size_t max_rank = 50);

}  // namespace reidtk::evalkit
