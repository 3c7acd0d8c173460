#include "commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>

#include "reidtk/datagen.hpp"
#include "reidtk/error.hpp"
#include "reidtk/evalkit.hpp"
#include "reidtk/fileio.hpp"
#include "reidtk/labels.hpp"
#include "reidtk/npy.hpp"
#include "reidtk/pipeline.hpp"
#include "reidtk/report.hpp"
#include "reidtk/version.hpp"

namespace reidtk::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Values given on the command line; unset fields keep the preset/default.
struct ConfigFlags {
  std::string preset;
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;
  std::optional<double> gamma;
  std::optional<std::size_t> orders;
  std::optional<double> sigma;
  std::string sigma_mode;
  std::optional<std::size_t> batch_size;
  std::optional<int> fill;
  std::vector<double> alphas;
  std::optional<std::size_t> max_rank;
  std::optional<std::size_t> block;
  bool no_dmon = false;
  bool no_aro = false;
  bool aro_raw = false;
  bool joint = false;
  bool no_prenormalize = false;
  bool disjoint_orders = false;
  bool literal_weights = false;
};

struct DataFlags {
  std::string query;
  std::string gallery;
  std::string query_labels;
  std::string gallery_labels;
};

void add_synth_options(CLI::App& app, datagen::SynthSpec& spec) {
  app.add_option("--ids", spec.num_ids, "Number of identities")->capture_default_str();
  app.add_option("--per-id", spec.imgs_per_id, "Images per identity")->capture_default_str();
  app.add_option("--dim", spec.dim, "Feature dimension")->capture_default_str();
  app.add_option("--cams", spec.num_cams, "Number of cameras")->capture_default_str();
  app.add_option("--noise", spec.intra_noise, "Per-coordinate Gaussian noise std")->capture_default_str();
  app.add_option("--cam-offset", spec.cam_offset_scale, "Norm of each camera offset")->capture_default_str();
  app.add_option("--query-fraction", spec.query_fraction, "Fraction of each identity used as queries")
      ->capture_default_str();
  app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
}

// With `grid`, the caller registers --k1/--k2/--gamma/--orders as lists.
void add_config_options(CLI::App& app, ConfigFlags& f, bool grid = false) {
  std::vector<std::string> names;
  for (const auto& p : pipeline::presets()) names.emplace_back(p.name);
  app.add_option("--preset", f.preset, "Dataset hyperparameter preset")->check(CLI::IsMember(names));
  if (!grid) {
    app.add_option("--k1", f.k1, "First-order neighbor count");
    app.add_option("--k2", f.k2, "Neighborhood size of the distance filter");
    app.add_option("--gamma", f.gamma, "Weight of the original features")->check(CLI::Range(0.0, 1.0));
    app.add_option("--orders", f.orders, "Highest neighbor order");
  }
  app.add_option("--sigma", f.sigma, "Base kernel bandwidth (implies --sigma-mode fixed)");
  app.add_option("--sigma-mode", f.sigma_mode, "Bandwidth selection")->check(CLI::IsMember({"fixed", "adaptive"}));
  app.add_option("--batch-size", f.batch_size, "Rows per enhancement chunk (0 = unlimited)");
  app.add_option("--fill", f.fill, "Value outside the kept neighborhood")->check(CLI::IsMember({0, 1}));
  app.add_option("--alphas", f.alphas, "Per-order decay coefficients")->delimiter(',');
  app.add_option("--max-rank", f.max_rank, "Highest CMC rank reported");
  app.add_option("--block", f.block, "Tile size of the distance kernel");
  app.add_flag("--no-dmon", f.no_dmon, "Skip feature enhancement");
  app.add_flag("--no-aro", f.no_aro, "Skip distance optimization");
  app.add_flag("--aro-raw", f.aro_raw, "Optimize distances of the raw rather than enhanced features");
  app.add_flag("--joint", f.joint, "Enhance query and gallery as one set");
  app.add_flag("--no-prenormalize", f.no_prenormalize, "Do not L2-normalize input features");
  app.add_flag("--disjoint-orders", f.disjoint_orders, "Drop neighbors already present at a lower order");
  app.add_flag("--literal-weights", f.literal_weights, "Use unnormalized Gaussian weight rows");
}

void add_data_options(CLI::App& app, DataFlags& d, bool labels) {
  app.add_option("--query", d.query, "Query features (.npy)");
  app.add_option("--gallery", d.gallery, "Gallery features (.npy)");
  if (labels) {
    app.add_option("--query-labels", d.query_labels, "Query labels (.csv)");
    app.add_option("--gallery-labels", d.gallery_labels, "Gallery labels (.csv)");
  }
}

pipeline::PipelineConfig resolve_config(const ConfigFlags& f) {
  pipeline::PipelineConfig cfg;
  if (!f.preset.empty()) {
    const auto preset = pipeline::find_preset(f.preset);
    if (!preset) throw ConfigError("unknown preset '" + f.preset + "'");
    pipeline::apply_preset(cfg, *preset);
  }
  if (f.k1) cfg.dmon.k1 = *f.k1;
  if (f.k2) cfg.aro.k2 = *f.k2;
  if (f.gamma) cfg.dmon.gamma = *f.gamma;
  if (f.orders) cfg.dmon.orders = *f.orders;
  if (f.sigma) {
    cfg.dmon.sigma = *f.sigma;
    cfg.dmon.sigma_mode = dmon::SigmaMode::kFixed;
  }
  if (f.sigma_mode == "fixed") cfg.dmon.sigma_mode = dmon::SigmaMode::kFixed;
  if (f.sigma_mode == "adaptive") cfg.dmon.sigma_mode = dmon::SigmaMode::kAdaptive;
  if (f.batch_size) cfg.dmon.batch_size = *f.batch_size;
  if (f.fill) cfg.aro.fill_value = static_cast<double>(*f.fill);
  if (!f.alphas.empty()) cfg.dmon.alphas = f.alphas;
  if (f.max_rank) cfg.max_rank = *f.max_rank;
  if (f.block) cfg.block = *f.block;
  cfg.dmon_on = !f.no_dmon;
  cfg.aro_on = !f.no_aro;
  cfg.aro_uses_enhanced = !f.aro_raw;
  cfg.joint = f.joint;
  cfg.prenormalize = !f.no_prenormalize;
  cfg.dmon.disjoint_orders = f.disjoint_orders;
  cfg.dmon.normalize_weight_rows = !f.literal_weights;
  return cfg;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

FeatureMatrix load_features(const std::string& path) {
  FeatureMatrix f(npy::read_file(path));
  if (f.rows() == 0 || f.dim() == 0) throw DataError("'" + path + "' holds an empty matrix");
  return f;
}

pipeline::Dataset load_dataset(const DataFlags& d) {
  require(d.query, "--query");
  require(d.gallery, "--gallery");
  require(d.query_labels, "--query-labels");
  require(d.gallery_labels, "--gallery-labels");
  pipeline::Dataset data{load_features(d.query), labels::read_file(d.query_labels), load_features(d.gallery),
                         labels::read_file(d.gallery_labels)};
  if (data.query_labels.size() != data.query.rows() || data.gallery_labels.size() != data.gallery.rows()) {
    throw DataError("label counts do not match feature rows");
  }
  return data;
}

npy::Precision parse_precision(const std::string& p) {
  return p == "f64" ? npy::Precision::kFloat64 : npy::Precision::kFloat32;
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

json synth_json(const datagen::SynthSpec& s) {
  return {{"ids", s.num_ids},   {"per_id", s.imgs_per_id},         {"dim", s.dim},
          {"cams", s.num_cams}, {"noise", s.intra_noise},          {"cam_offset", s.cam_offset_scale},
          {"query_fraction", s.query_fraction}, {"seed", s.seed}};
}

void write_table(const std::vector<pipeline::ResultRow>& rows, const std::string& out_path, std::ostream& out) {
  const std::string csv = pipeline::rows_to_csv(rows);
  out << csv;
  if (out_path.empty()) return;
  if (fs::path(out_path).extension() == ".json") {
    fileio::write_text(out_path, pipeline::rows_to_json(rows).dump(2) + "\n");
  } else {
    fileio::write_text(out_path, csv);
  }
}

// --- subcommands -----------------------------------------------------------

struct SynthCmd {
  datagen::SynthSpec spec;
  std::string out_dir;
  std::string precision = "f32";

  void run(std::ostream& out) const {
    require(out_dir, "--out");
    const auto data = datagen::generate(spec);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);
    const auto p = parse_precision(precision);
    npy::write_file(dir / "q.npy", data.query, p);
    npy::write_file(dir / "g.npy", data.gallery, p);
    labels::write_file(dir / "q_labels.csv", data.query_labels);
    labels::write_file(dir / "g_labels.csv", data.gallery_labels);
    out << "wrote " << data.query.rows() << " queries and " << data.gallery.rows() << " gallery samples to "
        << dir.string() << "\n";
  }
};

struct RerankCmd {
  DataFlags data;
  ConfigFlags flags;
  std::string out_path;
  std::string manifest;
  std::string from_manifest;
  std::string precision = "f32";
  bool baseline = false;
  std::uint64_t seed = 0;

  void run(std::ostream& out) {
    pipeline::PipelineConfig cfg;
    if (!from_manifest.empty()) {
      json m;
      try {
        m = json::parse(fileio::read_text(from_manifest));
        cfg = pipeline::config_from_json(m.at("config"));
        data.query = m.at("inputs").at("query").get<std::string>();
        data.gallery = m.at("inputs").at("gallery").get<std::string>();
        baseline = m.at("baseline").get<bool>();
        precision = m.at("precision").get<std::string>();
        seed = m.at("seed").get<std::uint64_t>();
        if (out_path.empty()) out_path = m.at("output").get<std::string>();
      } catch (const json::exception& e) {
        throw ConfigError("malformed manifest '" + from_manifest + "': " + e.what());
      }
    } else {
      cfg = resolve_config(flags);
    }
    if (baseline) {
      cfg.dmon_on = false;
      cfg.aro_on = false;
    }
    cfg.validate(baseline);
    require(data.query, "--query");
    require(data.gallery, "--gallery");
    require(out_path, "--out");

    const FeatureMatrix fq = load_features(data.query);
    const FeatureMatrix fg = load_features(data.gallery);
    const DistanceMatrix d = pipeline::rerank(fq, fg, cfg);
    npy::write_file(out_path, d, parse_precision(precision));

    const json m = {
        {"command", "rerank"},
        {"version", kVersion},
        {"inputs", {{"query", data.query}, {"gallery", data.gallery}}},
        {"output", out_path},
        {"precision", precision},
        {"baseline", baseline},
        {"seed", seed},
        {"shape", {d.rows(), d.cols()}},
        {"config", pipeline::to_json(cfg)},
    };
    const std::string mpath = manifest.empty() ? manifest_path(out_path) : manifest;
    fileio::write_text(mpath, m.dump(2) + "\n");
    out << "wrote " << d.rows() << "x" << d.cols() << " distances to " << out_path << "\n";
  }
};

struct EvalCmd {
  std::string dist;
  DataFlags data;
  std::size_t max_rank = 50;
  std::string out_path;

  void run(std::ostream& out) const {
    require(dist, "--dist");
    require(data.query_labels, "--query-labels");
    require(data.gallery_labels, "--gallery-labels");
    const DistanceMatrix d(npy::read_file(dist), false);
    const auto q = labels::read_file(data.query_labels);
    const auto g = labels::read_file(data.gallery_labels);
    const auto r = evalkit::evaluate(d, q, g, max_rank);
    const json cfg = {{"dist", dist},
                      {"query_labels", data.query_labels},
                      {"gallery_labels", data.gallery_labels},
                      {"max_rank", max_rank},
                      {"version", kVersion}};
    const std::string text = report::to_json(r, cfg).dump(2) + "\n";
    if (!out_path.empty()) fileio::write_text(out_path, text);
    out << text;
  }
};

pipeline::Dataset dataset_for(const DataFlags& data, const datagen::SynthSpec& spec) {
  if (!data.query.empty() || !data.gallery.empty()) return load_dataset(data);
  return datagen::generate(spec);
}

struct SweepCmd {
  DataFlags data;
  datagen::SynthSpec spec;
  ConfigFlags flags;
  std::vector<std::size_t> k1;
  std::vector<std::size_t> k2;
  std::vector<double> gamma;
  std::vector<std::size_t> orders;
  std::string out_path;

  void run(std::ostream& out) const {
    const auto base = resolve_config(flags);
    pipeline::SweepGrid grid{k1, k2, gamma, orders};
    if (grid.k1.empty()) grid.k1 = {base.dmon.k1};
    if (grid.k2.empty()) grid.k2 = {base.aro.k2};
    if (grid.gamma.empty()) grid.gamma = {base.dmon.gamma};
    if (grid.orders.empty()) grid.orders = {base.dmon.orders};
    const auto rows = pipeline::sweep(dataset_for(data, spec), base, grid);
    write_table(rows, out_path, out);
    if (!out_path.empty()) {
      const json m = {{"command", "sweep"},
                      {"version", kVersion},
                      {"data", data.query.empty() ? synth_json(spec) : json{{"query", data.query}, {"gallery", data.gallery}}},
                      {"grid", {{"k1", grid.k1}, {"k2", grid.k2}, {"gamma", grid.gamma}, {"orders", grid.orders}}},
                      {"config", pipeline::to_json(base)}};
      fileio::write_text(manifest_path(out_path), m.dump(2) + "\n");
    }
  }
};

struct PipelineCmd {
  datagen::SynthSpec spec;
  ConfigFlags flags;
  bool ablation = false;
  std::string out_path;

  void run(std::ostream& out) const {
    const auto cfg = resolve_config(flags);
    cfg.validate();
    const auto data = datagen::generate(spec);
    std::vector<pipeline::ResultRow> rows;
    if (ablation) {
      rows = pipeline::ablation(data, cfg);
    } else {
      const auto all = pipeline::ablation(data, cfg);
      rows = {all.front()};
      const std::string method = cfg.dmon_on && cfg.aro_on ? "+DMON+ARO" : cfg.dmon_on ? "+DMON" : "+ARO";
      for (const auto& r : all) {
        if (r.label == method) rows.push_back(r);
      }
    }
    write_table(rows, out_path, out);
    if (!out_path.empty()) {
      const json m = {{"command", "pipeline"},
                      {"version", kVersion},
                      {"ablation", ablation},
                      {"synth", synth_json(spec)},
                      {"config", pipeline::to_json(cfg)}};
      fileio::write_text(manifest_path(out_path), m.dump(2) + "\n");
    }
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neighbor-context re-ranking toolkit for retrieval distance matrices", "reidtk"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SynthCmd synth;
  auto* synth_app = app.add_subcommand("synth", "Generate a seeded synthetic query/gallery set");
  add_synth_options(*synth_app, synth.spec);
  synth_app->add_option("--out", synth.out_dir, "Output directory");
  synth_app->add_option("--precision", synth.precision, "Feature dtype")->check(CLI::IsMember({"f32", "f64"}));

  RerankCmd rerank;
  auto* rerank_app = app.add_subcommand("rerank", "Enhance features and optimize query-gallery distances");
  add_data_options(*rerank_app, rerank.data, /*labels=*/true);
  add_config_options(*rerank_app, rerank.flags);
  rerank_app->add_option("--out", rerank.out_path, "Output distance matrix (.npy)");
  rerank_app->add_option("--manifest", rerank.manifest, "Manifest path (default <out>.manifest.json)");
  rerank_app->add_option("--from-manifest", rerank.from_manifest, "Re-run with the parameters of a manifest");
  rerank_app->add_option("--precision", rerank.precision, "Output dtype")->check(CLI::IsMember({"f32", "f64"}));
  rerank_app->add_option("--seed", rerank.seed, "Recorded in the manifest; reranking itself is deterministic");
  rerank_app->add_flag("--baseline", rerank.baseline, "Plain squared Euclidean distances");

  EvalCmd eval;
  auto* eval_app = app.add_subcommand("eval", "Compute CMC and mAP for a distance matrix");
  eval_app->add_option("--dist", eval.dist, "Distance matrix (.npy)");
  add_data_options(*eval_app, eval.data, /*labels=*/true);
  eval_app->add_option("--max-rank", eval.max_rank, "Highest CMC rank reported")->capture_default_str();
  eval_app->add_option("--out", eval.out_path, "Report path (.json)");

  SweepCmd sweep;
  auto* sweep_app = app.add_subcommand("sweep", "Grid search over k1, k2, gamma and orders");
  add_data_options(*sweep_app, sweep.data, /*labels=*/true);
  add_synth_options(*sweep_app, sweep.spec);
  add_config_options(*sweep_app, sweep.flags, /*grid=*/true);
  sweep_app->add_option("--k1", sweep.k1, "k1 values, comma separated")->delimiter(',');
  sweep_app->add_option("--k2", sweep.k2, "k2 values, comma separated")->delimiter(',');
  sweep_app->add_option("--gamma", sweep.gamma, "gamma values, comma separated")->delimiter(',');
  sweep_app->add_option("--orders", sweep.orders, "order counts, comma separated")->delimiter(',');
  sweep_app->add_option("--out", sweep.out_path, "Table path (.csv or .json)");

  PipelineCmd pipe;
  auto* pipe_app = app.add_subcommand("pipeline", "Synthesize, rerank and evaluate in one go");
  add_synth_options(*pipe_app, pipe.spec);
  add_config_options(*pipe_app, pipe.flags);
  pipe_app->add_flag("--ablation", pipe.ablation, "Report baseline, +ARO, +DMON and +DMON+ARO");
  pipe_app->add_option("--out", pipe.out_path, "Table path (.csv or .json)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*synth_app) synth.run(out);
    if (*rerank_app) rerank.run(out);
    if (*eval_app) eval.run(out);
    if (*sweep_app) sweep.run(out);
    if (*pipe_app) pipe.run(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace reidtk::cli
