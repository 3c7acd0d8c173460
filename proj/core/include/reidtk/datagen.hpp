#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "reidtk/evalkit.hpp"
#include "reidtk/matrix.hpp"

namespace reidtk::datagen {

/// Portable random source.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not portable, so the transforms
/// are done here: uniforms take the top 53 bits scaled by 2^-53, normals use
/// the Box-Muller transform and consume two uniforms per pair of normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SynthSpec {
  std::size_t num_ids = 50;
  std::size_t imgs_per_id = 10;
  std::size_t dim = 64;
  std::size_t num_cams = 4;
  double intra_noise = 0.35;
  double cam_offset_scale = 0.25;
  double query_fraction = 0.2;
  std::uint64_t seed = 7;

  void validate() const;
  /// Queries drawn per identity: ceil(query_fraction * imgs_per_id), capped
  /// so at least one gallery image remains.
  std::size_t queries_per_id() const;
};

struct SynthData {
  FeatureMatrix query;
  evalkit::SampleLabels query_labels;
  FeatureMatrix gallery;
  evalkit::SampleLabels gallery_labels;
};

/// Identity centers uniform on the unit sphere, one fixed offset of norm
/// cam_offset_scale per camera, isotropic Gaussian noise per sample, then
/// row normalization. Cameras are assigned so that every query shares its
/// identity with a gallery sample from another camera.
SynthData generate(const SynthSpec& spec);

}  // namespace reidtk::datagen
