#include "reidtk/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "reidtk/error.hpp"
#include "reidtk/tensor.hpp"

namespace reidtk::datagen {
namespace {

std::vector<double> unit_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& x : v) {
      x = rng.normal();
      sq += x * x;
    }
  } while (sq == 0.0);
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ConfigError("empty integer range");
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void SynthSpec::validate() const {
  if (num_ids < 2) throw ConfigError("need at least 2 identities");
  if (imgs_per_id < 2) throw ConfigError("need at least 2 images per identity");
  if (num_cams < 2) throw ConfigError("need at least 2 cameras, otherwise no cross-camera query exists");
  if (dim < 1) throw ConfigError("feature dimension must be >= 1");
  if (!(intra_noise >= 0.0) || !std::isfinite(intra_noise)) throw ConfigError("intra noise must be >= 0");
  if (!(cam_offset_scale >= 0.0) || !std::isfinite(cam_offset_scale)) {
    throw ConfigError("camera offset scale must be >= 0");
  }
  if (!(query_fraction > 0.0 && query_fraction < 1.0)) throw ConfigError("query fraction must lie in (0, 1)");
}

std::size_t SynthSpec::queries_per_id() const {
  const auto q = static_cast<std::size_t>(std::ceil(query_fraction * static_cast<double>(imgs_per_id)));
  return std::clamp<std::size_t>(q, 1, imgs_per_id - 1);
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t d = spec.dim;
  const std::size_t cams = spec.num_cams;
  const std::size_t per_query = spec.queries_per_id();
  const std::size_t per_gallery = spec.imgs_per_id - per_query;

  std::vector<std::vector<double>> centers;
  centers.reserve(spec.num_ids);
  for (std::size_t i = 0; i < spec.num_ids; ++i) centers.push_back(unit_vector(rng, d));

  std::vector<std::vector<double>> offsets;
  offsets.reserve(cams);
  for (std::size_t c = 0; c < cams; ++c) {
    auto v = unit_vector(rng, d);
    for (double& x : v) x *= spec.cam_offset_scale;
    offsets.push_back(std::move(v));
  }

  SynthData out;
  std::vector<double> qdata;
  std::vector<double> gdata;
  qdata.reserve(spec.num_ids * per_query * d);
  gdata.reserve(spec.num_ids * per_gallery * d);
  const auto draw = [&](std::size_t id, std::size_t cam, std::vector<double>& dst) {
    for (std::size_t t = 0; t < d; ++t) {
      dst.push_back(centers[id][t] + offsets[cam][t] + spec.intra_noise * rng.normal());
    }
  };

  for (std::size_t id = 0; id < spec.num_ids; ++id) {
    const auto start = static_cast<std::size_t>(rng.below(cams));
    // Gallery cameras cycle from `start`; two or more gallery images thus
    // span two cameras. A lone gallery image keeps camera `start` and the
    // queries avoid it.
    for (std::size_t j = 0; j < per_query; ++j) {
      const std::size_t cam = per_gallery >= 2 ? (start + per_gallery + j) % cams
                                               : (start + 1 + j % (cams - 1)) % cams;
      draw(id, cam, qdata);
      out.query_labels.push_back(static_cast<std::int64_t>(id), static_cast<std::int64_t>(cam));
    }
    for (std::size_t m = 0; m < per_gallery; ++m) {
      const std::size_t cam = (start + m) % cams;
      draw(id, cam, gdata);
      out.gallery_labels.push_back(static_cast<std::int64_t>(id), static_cast<std::int64_t>(cam));
    }
  }
  out.query = tensor::l2_normalize_rows(FeatureMatrix(spec.num_ids * per_query, d, std::move(qdata)));
  out.gallery = tensor::l2_normalize_rows(FeatureMatrix(spec.num_ids * per_gallery, d, std::move(gdata)));
  return out;
}

}  // namespace reidtk::datagen
