#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "reidtk/aro.hpp"
#include "reidtk/datagen.hpp"
#include "reidtk/dmon.hpp"
#include "reidtk/evalkit.hpp"

namespace reidtk::pipeline {

using Dataset = datagen::SynthData;

struct PipelineConfig {
  dmon::DmonConfig dmon;
  aro::AroConfig aro;
  bool dmon_on = true;
  bool aro_on = true;
  /// Feed the enhanced features to the optimizer (otherwise the raw ones).
  bool aro_uses_enhanced = true;
  /// Enhance query and gallery as one stacked set instead of separately.
  bool joint = false;
  /// L2-normalize inputs before anything else.
  bool prenormalize = true;
  std::size_t max_rank = 50;
  std::size_t block = tensor::kDefaultBlock;

  /// `baseline` permits both stages to be off.
  void validate(bool baseline = false) const;
};

/// Hyperparameter bundle published for a benchmark dataset.
struct Preset {
  std::string_view name;
  std::size_t k1;
  std::size_t k2;
  double gamma;
  std::size_t orders;
  std::size_t batch_size;  // 0 = single chunk
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(std::string_view name);
void apply_preset(PipelineConfig& cfg, const Preset& preset);

nlohmann::json to_json(const PipelineConfig& cfg);
/// Inverse of to_json. Throws ConfigError on unknown enum values or bad types.
PipelineConfig config_from_json(const nlohmann::json& j);

/// Query x gallery ranking distances after the enabled stages.
DistanceMatrix rerank(const FeatureMatrix& query, const FeatureMatrix& gallery, const PipelineConfig& cfg);

struct ResultRow {
  std::string label;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  double gamma = 0.0;
  std::size_t orders = 0;
  bool dmon = false;
  bool aro = false;
  double mean_ap = 0.0;
  double rank1 = 0.0;
  double delta_map = 0.0;
  double delta_rank1 = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Rows "baseline", "+ARO", "+DMON", "+DMON+ARO", in that order.
std::vector<ResultRow> ablation(const Dataset& data, const PipelineConfig& cfg);

struct SweepGrid {
  std::vector<std::size_t> k1;
  std::vector<std::size_t> k2;
  std::vector<double> gamma;
  std::vector<std::size_t> orders;

  std::size_t cell_count() const { return k1.size() * k2.size() * gamma.size() * orders.size(); }
};

/// A "baseline" reference row followed by one row per grid cell (k1
/// outermost, then k2, gamma, orders). Every cell runs both stages.
std::vector<ResultRow> sweep(const Dataset& data, const PipelineConfig& base, const SweepGrid& grid);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);

}  // namespace reidtk::pipeline
