#pragma once

#include <cstddef>

#include "reidtk/matrix.hpp"
#include "reidtk/tensor.hpp"

// Query-to-gallery distance refinement through an asymmetric similarity
// built from top-k2 filtered query-gallery and gallery-gallery distances.
namespace reidtk::aro {

struct AroConfig {
  std::size_t k2 = 20;
  /// Value written outside each row's top-k2 neighborhood; 1.0 or 0.0.
  double fill_value = 1.0;
  bool enabled = true;

  void validate() const;
};

struct DistancePair {
  DistanceMatrix query_gallery;    // Nq x Ng, squared
  DistanceMatrix gallery_gallery;  // Ng x Ng, squared, zero diagonal
};

DistancePair build_distance_pair(const FeatureMatrix& fq, const FeatureMatrix& fg,
                                 std::size_t block = tensor::kDefaultBlock);

/// Keeps each row's k2 smallest entries (ties by column index, self column
/// not excluded) and overwrites the rest with `fill`.
DistanceMatrix neighborhood_filter(const DistanceMatrix& d, std::size_t k2, double fill);

/// A = rownorm(dqg_f) * rownorm(dgg_f)^T, clamped to [0, 1].
DistanceMatrix asymmetric_similarity(const DistanceMatrix& dqg_f, const DistanceMatrix& dgg_f);

/// D_match = D_qg - A with A formed from the filtered matrices. Returns the
/// raw D_qg when cfg.enabled is false.
///
/// The filtered rows are `fill` everywhere except at k2 columns, so A is
/// evaluated from the k2-sparse deviations without materialising either
/// filtered matrix or the full gallery-gallery matrix. Gallery neighborhoods
/// are found in row tiles of `block`.
DistanceMatrix optimize(const FeatureMatrix& fq, const FeatureMatrix& fg, const AroConfig& cfg,
                        std::size_t block = tensor::kDefaultBlock);

}  // namespace reidtk::aro
