#include "reidtk/pipeline.hpp"

#include <array>
#include <cstdio>

#include "reidtk/error.hpp"
#include "reidtk/tensor.hpp"
#include "reidtk/version.hpp"

namespace reidtk::pipeline {
namespace {

const char* sigma_mode_name(dmon::SigmaMode m) { return m == dmon::SigmaMode::kFixed ? "fixed" : "adaptive"; }

ResultRow score(const Dataset& data, const PipelineConfig& cfg, std::string label) {
  const auto d = rerank(data.query, data.gallery, cfg);
  const auto report = evalkit::evaluate(d, data.query_labels, data.gallery_labels, cfg.max_rank);
  ResultRow row;
  row.label = std::move(label);
  row.k1 = cfg.dmon.k1;
  row.k2 = cfg.aro.k2;
  row.gamma = cfg.dmon.gamma;
  row.orders = cfg.dmon.orders;
  row.dmon = cfg.dmon_on;
  row.aro = cfg.aro_on;
  row.mean_ap = report.mean_ap;
  row.rank1 = report.rank1();
  return row;
}

void fill_deltas(std::vector<ResultRow>& rows) {
  if (rows.empty()) return;
  const ResultRow base = rows.front();
  for (auto& r : rows) {
    r.delta_map = r.mean_ap - base.mean_ap;
    r.delta_rank1 = r.rank1 - base.rank1;
  }
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.10g", v);
  return buf.data();
}

}  // namespace

void PipelineConfig::validate(bool baseline) const {
  dmon.validate();
  aro.validate();
  if (!baseline && !dmon_on && !aro_on) {
    throw ConfigError("both enhancement and optimization are disabled; use the baseline mode for plain ranking");
  }
  if (max_rank < 1) throw ConfigError("max rank must be >= 1");
  if (block < 1) throw ConfigError("distance block size must be >= 1");
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"market1501", 2, 20, 0.75, 3, 0},
      {"dukemtmc", 5, 20, 0.75, 3, 0},
      {"msmt17", 5, 2, 0.75, 3, 10000},
  };
  return all;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

void apply_preset(PipelineConfig& cfg, const Preset& preset) {
  cfg.dmon.k1 = preset.k1;
  cfg.aro.k2 = preset.k2;
  cfg.dmon.gamma = preset.gamma;
  cfg.dmon.orders = preset.orders;
  cfg.dmon.batch_size = preset.batch_size;
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  return {
      {"version", kVersion},
      {"dmon",
       {{"enabled", cfg.dmon_on},
        {"k1", cfg.dmon.k1},
        {"orders", cfg.dmon.orders},
        {"gamma", cfg.dmon.gamma},
        {"sigma_mode", sigma_mode_name(cfg.dmon.sigma_mode)},
        {"sigma", cfg.dmon.sigma},
        {"alphas", cfg.dmon.effective_alphas()},
        {"normalize_weight_rows", cfg.dmon.normalize_weight_rows},
        {"disjoint_orders", cfg.dmon.disjoint_orders},
        {"batch_size", cfg.dmon.batch_size},
        {"joint", cfg.joint}}},
      {"aro",
       {{"enabled", cfg.aro_on},
        {"k2", cfg.aro.k2},
        {"fill", cfg.aro.fill_value},
        {"uses_enhanced", cfg.aro_uses_enhanced}}},
      {"prenormalize", cfg.prenormalize},
      {"max_rank", cfg.max_rank},
      {"block", cfg.block},
  };
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    const auto& d = j.at("dmon");
    cfg.dmon_on = d.at("enabled").get<bool>();
    cfg.dmon.k1 = d.at("k1").get<std::size_t>();
    cfg.dmon.orders = d.at("orders").get<std::size_t>();
    cfg.dmon.gamma = d.at("gamma").get<double>();
    const auto mode = d.at("sigma_mode").get<std::string>();
    if (mode == "fixed") {
      cfg.dmon.sigma_mode = dmon::SigmaMode::kFixed;
    } else if (mode == "adaptive") {
      cfg.dmon.sigma_mode = dmon::SigmaMode::kAdaptive;
    } else {
      throw ConfigError("unknown sigma mode '" + mode + "'");
    }
    cfg.dmon.sigma = d.at("sigma").get<double>();
    cfg.dmon.alphas = d.at("alphas").get<std::vector<double>>();
    cfg.dmon.normalize_weight_rows = d.at("normalize_weight_rows").get<bool>();
    cfg.dmon.disjoint_orders = d.at("disjoint_orders").get<bool>();
    cfg.dmon.batch_size = d.at("batch_size").get<std::size_t>();
    cfg.joint = d.at("joint").get<bool>();
    const auto& a = j.at("aro");
    cfg.aro_on = a.at("enabled").get<bool>();
    cfg.aro.k2 = a.at("k2").get<std::size_t>();
    cfg.aro.fill_value = a.at("fill").get<double>();
    cfg.aro_uses_enhanced = a.at("uses_enhanced").get<bool>();
    cfg.prenormalize = j.at("prenormalize").get<bool>();
    cfg.max_rank = j.at("max_rank").get<std::size_t>();
    cfg.block = j.at("block").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return cfg;
}

DistanceMatrix rerank(const FeatureMatrix& query, const FeatureMatrix& gallery, const PipelineConfig& cfg) {
  cfg.validate(/*baseline=*/true);
  if (query.dim() != gallery.dim()) {
    throw DataError("query dim " + std::to_string(query.dim()) + " != gallery dim " + std::to_string(gallery.dim()));
  }
  const FeatureMatrix fq = cfg.prenormalize ? tensor::l2_normalize_rows(query) : query;
  const FeatureMatrix fg = cfg.prenormalize ? tensor::l2_normalize_rows(gallery) : gallery;

  FeatureMatrix eq;
  FeatureMatrix eg;
  if (cfg.dmon_on) {
    if (cfg.joint) {
      const FeatureMatrix both = dmon::enhance(concat_rows(fq, fg), cfg.dmon);
      eq = FeatureMatrix(both.slice_rows(0, fq.rows()));
      eg = FeatureMatrix(both.slice_rows(fq.rows(), fg.rows()));
    } else {
      eq = dmon::enhance(fq, cfg.dmon);
      eg = dmon::enhance(fg, cfg.dmon);
    }
  }
  const FeatureMatrix& rq = cfg.dmon_on ? eq : fq;
  const FeatureMatrix& rg = cfg.dmon_on ? eg : fg;

  if (!cfg.aro_on) return tensor::pairwise_sq_euclidean(rq, rg, cfg.block);
  const bool raw = !cfg.dmon_on || !cfg.aro_uses_enhanced;
  aro::AroConfig a = cfg.aro;
  a.enabled = true;
  return aro::optimize(raw ? fq : rq, raw ? fg : rg, a, cfg.block);
}

std::vector<ResultRow> ablation(const Dataset& data, const PipelineConfig& cfg) {
  cfg.validate(/*baseline=*/true);
  struct Variant {
    const char* label;
    bool dmon;
    bool aro;
  };
  constexpr std::array<Variant, 4> variants = {{
      {"baseline", false, false},
      {"+ARO", false, true},
      {"+DMON", true, false},
      {"+DMON+ARO", true, true},
  }};
  std::vector<ResultRow> rows;
  for (const auto& v : variants) {
    PipelineConfig c = cfg;
    c.dmon_on = v.dmon;
    c.aro_on = v.aro;
    rows.push_back(score(data, c, v.label));
  }
  fill_deltas(rows);
  return rows;
}

std::vector<ResultRow> sweep(const Dataset& data, const PipelineConfig& base, const SweepGrid& grid) {
  if (grid.cell_count() == 0) throw ConfigError("sweep grid is empty");
  PipelineConfig ref = base;
  ref.dmon_on = false;
  ref.aro_on = false;
  std::vector<ResultRow> rows;
  rows.reserve(grid.cell_count() + 1);
  rows.push_back(score(data, ref, "baseline"));
  for (std::size_t k1 : grid.k1) {
    for (std::size_t k2 : grid.k2) {
      for (double gamma : grid.gamma) {
        for (std::size_t orders : grid.orders) {
          PipelineConfig c = base;
          c.dmon_on = true;
          c.aro_on = true;
          c.dmon.k1 = k1;
          c.aro.k2 = k2;
          c.dmon.gamma = gamma;
          c.dmon.orders = orders;
          if (!c.dmon.alphas.empty() && c.dmon.alphas.size() < orders) c.dmon.alphas.clear();
          c.validate();
          rows.push_back(score(data, c, "cell"));
        }
      }
    }
  }
  fill_deltas(rows);
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "label,k1,k2,gamma,orders,dmon,aro,mAP,rank1,delta_mAP,delta_rank1\n";
  for (const auto& r : rows) {
    out += r.label + ',' + std::to_string(r.k1) + ',' + std::to_string(r.k2) + ',' + fmt(r.gamma) + ',' +
           std::to_string(r.orders) + ',' + (r.dmon ? "1" : "0") + ',' + (r.aro ? "1" : "0") + ',' +
           fmt(r.mean_ap) + ',' + fmt(r.rank1) + ',' + fmt(r.delta_map) + ',' + fmt(r.delta_rank1) + '\n';
  }
  return out;
}

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"label", r.label},
                   {"k1", r.k1},
                   {"k2", r.k2},
                   {"gamma", r.gamma},
                   {"orders", r.orders},
                   {"dmon", r.dmon},
                   {"aro", r.aro},
                   {"mAP", r.mean_ap},
                   {"rank1", r.rank1},
                   {"delta_mAP", r.delta_map},
                   {"delta_rank1", r.delta_rank1}});
  }
  return out;
}

}  // namespace reidtk::pipeline
