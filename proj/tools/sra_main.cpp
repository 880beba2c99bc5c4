#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sra/evaluation.hpp"
#include "sra/geometry.hpp"
#include "sra/heatmap.hpp"
#include "sra/indicators.hpp"
#include "sra/ingest.hpp"
#include "sra/manifest.hpp"
#include "sra/pipeline.hpp"
#include "sra/projection.hpp"
#include "sra/riskmodel.hpp"
#include "sra/scene.hpp"
#include "sra/simulator.hpp"
#include "sra/types.hpp"

namespace fs = std::filesystem;
using namespace sra;

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

// "clip-3.stream.ndjson" and "clip-3.ndjson" both name video "clip-3".
std::string video_id_of(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  const std::string tag = ".stream";
  if (stem.size() > tag.size() &&
      stem.compare(stem.size() - tag.size(), tag.size(), tag) == 0) {
    stem.resize(stem.size() - tag.size());
  }
  return stem;
}

void note_input(RunManifest& m, const std::string& path) {
  m.input_digests[path] = digest_hex(fnv1a64_file(path));
}

void note_output_text(RunManifest& m, const std::string& path,
                      const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  out.close();
  m.output_digests[path] = digest_hex(fnv1a64_str(text));
}

void note_output_file(RunManifest& m, const std::string& path) {
  m.output_digests[path] = digest_hex(fnv1a64_file(path));
}

void finish(RunManifest& m, const Timer& timer, const std::string& path) {
  m.wall_seconds = timer.seconds();
  write_manifest(m, path);
}

std::vector<PointPair> read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::vector<PointPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("src", 0) == 0) continue;
    std::stringstream ss(line);
    std::string field;
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ss, field, ',')) {
        throw Error(ErrorKind::Parse, path + " line " +
                                          std::to_string(line_no) +
                                          ": expected 4 fields");
      }
      try {
        std::size_t used = 0;
        v[i] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, path + " line " +
                                          std::to_string(line_no) +
                                          ": bad number '" + field + "'");
      }
    }
    pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return pairs;
}

std::vector<std::string> feature_name_vec() {
  const auto& names = IndicatorVector::feature_names();
  return {names.begin(), names.end()};
}

std::vector<std::vector<double>> features_of(
    const std::vector<IndicatorRow>& rows) {
  std::vector<std::vector<double>> x;
  x.reserve(rows.size());
  for (const IndicatorRow& r : rows) {
    auto f = r.indicators.as_features();
    x.emplace_back(f.begin(), f.end());
  }
  return x;
}

std::vector<int> labels_of(const std::vector<IndicatorRow>& rows,
                           const std::string& what) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const IndicatorRow& r : rows) {
    if (!r.label) {
      throw Error(ErrorKind::Data, what + ": unlabeled row " + r.video_id +
                                       ":" + std::to_string(r.person_id));
    }
    y.push_back(*r.label);
  }
  return y;
}

// Evenly spaced subset so exact Shapley stays fast on big inputs.
std::vector<std::vector<double>> background_sample(
    const std::vector<std::vector<double>>& x, std::size_t cap = 64) {
  if (x.size() <= cap) return x;
  std::vector<std::vector<double>> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) {
    out.push_back(x[i * x.size() / cap]);
  }
  return out;
}

void print_explanation(const RiskModel& model,
                       const RiskModel::Explanation& ex) {
  std::vector<std::string> names = model.feature_names();
  if (static_cast<int>(names.size()) != model.n_features()) {
    names.clear();
    for (int i = 0; i < model.n_features(); ++i) {
      names.push_back("f" + std::to_string(i));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "  %-6s %+10.5f", "base", ex.base);
  std::cout << buf << "\n";
  double margin = ex.base;
  for (std::size_t i = 0; i < ex.attribution.size(); ++i) {
    margin += ex.attribution[i];
    std::snprintf(buf, sizeof(buf), "  %-6s %+10.5f", names[i].c_str(),
                  ex.attribution[i]);
    std::cout << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "  %-6s %+10.5f", "margin", margin);
  std::cout << buf << "\n";
}

struct CommonOpts {
  std::string config, in, out, labels, map, model, overlay, profile;
  double threshold = 0.2;
  double sigma = 0.5;
  std::int64_t tau = 0;
  std::int64_t stride = 1;
  int hysteresis = 3;
  int lt_min_events = 1;
  int folds = 10;
  int jobs = 1;
  std::uint64_t seed = 0;
  double offset = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool explain = false;
  bool at_risk_only = false;
};

int cmd_calibrate(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "calibrate";
  m.configs["scene"] = o.config;
  note_input(m, o.config);
  note_input(m, o.in);

  SceneConfig cfg = load_scene(o.config);
  std::vector<PointPair> pairs = read_pairs_csv(o.in);
  EstimateResult est = estimate(pairs);
  cfg.homography = est.h;
  cfg.validate();
  note_output_text(m, o.out, scene_to_json_text(cfg));
  std::printf("calibrated from %zu correspondences, reprojection rms %.3g\n",
              pairs.size(), est.reprojection_rms);
  finish(m, timer, o.out + ".manifest.json");
  return 0;
}

int cmd_zones(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "zones";
  m.configs["scene"] = o.config;
  note_input(m, o.config);

  SceneConfig cfg = load_scene(o.config);
  if (o.offset > 0.0) cfg.offset_d = o.offset;
  if (o.alpha > 0.0) cfg.alpha = o.alpha;
  if (o.beta > 0.0) cfg.beta = o.beta;
  cfg.validate();
  ZonePartition part = build_zone_partition(cfg);
  note_output_text(m, o.out, partition_to_json_text(part));
  if (!o.overlay.empty()) {
    write_zone_overlay_pgm(part, o.overlay);
    note_output_file(m, o.overlay);
  }
  finish(m, timer, o.out + ".manifest.json");
  return 0;
}

int cmd_heatmap(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "heatmap";
  m.configs["scene"] = o.config;
  note_input(m, o.config);
  note_input(m, o.in);

  SceneConfig cfg = load_scene(o.config);
  std::vector<PersonTimeline> timelines = load_stream(o.in, video_id_of(o.in));
  if (!o.labels.empty()) {
    note_input(m, o.labels);
    apply_labels(timelines, load_labels(o.labels));
  }
  if (o.at_risk_only && o.labels.empty()) {
    throw Error(ErrorKind::Data, "--at-risk-only needs --labels");
  }

  std::vector<HeatmapGrid> maps;
  for (const PersonTimeline& tl : timelines) {
    if (o.at_risk_only && (!tl.label || *tl.label != 1)) continue;
    std::vector<Vec2> points;
    points.reserve(tl.foot_points.size());
    for (const Vec2& fp : tl.foot_points) {
      points.push_back(apply(cfg.homography, fp));
    }
    maps.push_back(smooth(accumulate(points, cfg.grid).grid, o.sigma));
  }
  if (maps.empty()) {
    throw Error(ErrorKind::Data, "no timelines selected for aggregation");
  }
  HeatmapGrid map = normalize(aggregate(maps));

  write_pgm16(map, o.out + ".pgm");
  note_output_file(m, o.out + ".pgm");
  write_grid_csv(map, o.out + ".csv");
  note_output_file(m, o.out + ".csv");
  nlohmann::json side;
  side["format"] = "heatmap-summary";
  side["version"] = 1;
  side["extent"] = {{"min_x", map.spec.min_x},
                    {"min_y", map.spec.min_y},
                    {"max_x", map.spec.max_x},
                    {"max_y", map.spec.max_y}};
  side["cell"] = map.spec.cell;
  side["mass"] = map.mass();
  side["max"] = map.max_value();
  side["persons"] = maps.size();
  note_output_text(m, o.out + ".json", side.dump(2) + "\n");
  std::printf("aggregated %zu person maps\n", maps.size());
  finish(m, timer, o.out + ".manifest.json");
  return 0;
}

int cmd_indicators(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "indicators";
  m.configs["scene"] = o.config;
  note_input(m, o.config);
  note_input(m, o.in);

  SceneConfig cfg = load_scene(o.config);
  std::vector<PersonTimeline> timelines = load_stream(o.in, video_id_of(o.in));
  if (!o.labels.empty()) {
    note_input(m, o.labels);
    apply_labels(timelines, load_labels(o.labels));
  }
  HeatmapGrid map = make_grid(cfg.grid);
  if (!o.map.empty()) {
    note_input(m, o.map);
    map = read_grid_csv(o.map, cfg.grid);
  }
  ZonePartition part = build_zone_partition(cfg);
  IndicatorConfig icfg{o.hysteresis, o.lt_min_events};

  std::vector<IndicatorRow> rows;
  for (const PersonTimeline& tl : timelines) {
    if (tl.samples.empty()) continue;
    IndicatorRow row;
    row.video_id = tl.video_id;
    row.person_id = tl.person_id;
    row.label = tl.label;
    if (o.tau == 0) {
      row.window_end = tl.samples.back().frame_index;
      row.indicators = compute_indicators(tl, part, map, cfg, {0, 1}, icfg);
      rows.push_back(std::move(row));
    } else {
      SlidingResult sr =
          sliding_indicators(tl, part, map, cfg, {o.tau, o.stride}, icfg);
      for (const auto& [end, vec] : sr.windows) {
        row.window_end = end;
        row.indicators = vec;
        rows.push_back(row);
      }
    }
  }
  save_indicator_csv(rows, o.out);
  note_output_file(m, o.out);
  std::printf("wrote %zu indicator rows\n", rows.size());
  finish(m, timer, o.out + ".manifest.json");
  return 0;
}

int cmd_train(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "train";
  m.seeds["seed"] = o.seed;
  note_input(m, o.in);

  std::vector<IndicatorRow> rows = load_indicator_csv(o.in);
  if (rows.empty()) throw Error(ErrorKind::Data, o.in + ": no rows");
  auto x = features_of(rows);
  auto y = labels_of(rows, o.in);
  BoostParams params;
  params.seed = o.seed;
  RiskModel model = RiskModel::train(x, y, params, feature_name_vec());
  model.save(o.out);
  note_output_file(m, o.out);

  bool has_pos = false, has_neg = false;
  for (int v : y) (v == 1 ? has_pos : has_neg) = true;
  std::printf("trained %zu trees on %zu rows\n", model.trees().size(),
              rows.size());
  if (has_pos && has_neg) {
    std::printf("training auc %.4f\n", roc_auc(model.predict_batch(x), y));
  }
  finish(m, timer, o.out + ".manifest.json");
  return 0;
}

int score_like(const CommonOpts& o, bool explain_all, const char* name) {
  Timer timer;
  RunManifest m;
  m.command = name;
  m.configs["model"] = o.model;
  note_input(m, o.in);
  note_input(m, o.model);

  std::vector<IndicatorRow> rows = load_indicator_csv(o.in);
  if (rows.empty()) throw Error(ErrorKind::Data, o.in + ": no rows");
  RiskModel model = RiskModel::load(o.model);
  if (model.n_features() != 8) {
    throw Error(ErrorKind::Data, o.model + ": expected an 8-feature model");
  }
  auto x = features_of(rows);
  std::vector<double> scores = model.predict_batch(x);
  auto background = background_sample(x);

  std::printf("%-16s %6s %10s %8s  %s\n", "video_id", "person", "window",
              "risk", "flag");
  nlohmann::json out_rows = nlohmann::json::array();
  std::string csv = "video_id,person_id,window_end,risk,flagged\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool flagged = scores[i] > o.threshold;
    std::printf("%-16s %6d %10lld %8.4f  %s\n", rows[i].video_id.c_str(),
                rows[i].person_id,
                static_cast<long long>(rows[i].window_end), scores[i],
                flagged ? "*" : "");
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%d,%lld,%.17g,%d\n",
                  rows[i].video_id.c_str(), rows[i].person_id,
                  static_cast<long long>(rows[i].window_end), scores[i],
                  flagged ? 1 : 0);
    csv += line;
    if (explain_all || o.explain) {
      RiskModel::Explanation ex = model.explain(x[i], background);
      print_explanation(model, ex);
      if (explain_all) {
        nlohmann::json jr;
        jr["video_id"] = rows[i].video_id;
        jr["person_id"] = rows[i].person_id;
        jr["window_end"] = rows[i].window_end;
        jr["risk"] = scores[i];
        jr["base"] = ex.base;
        nlohmann::json attr;
        std::vector<std::string> names = model.feature_names();
        for (std::size_t f = 0; f < ex.attribution.size(); ++f) {
          std::string key = f < names.size() ? names[f] : "f" + std::to_string(f);
          attr[key] = ex.attribution[f];
        }
        jr["attribution"] = std::move(attr);
        out_rows.push_back(std::move(jr));
      }
    }
  }

  if (!o.out.empty()) {
    if (explain_all) {
      nlohmann::json j;
      j["format"] = "explanations";
      j["version"] = 1;
      j["background_rows"] = background.size();
      j["rows"] = std::move(out_rows);
      note_output_text(m, o.out, j.dump(2) + "\n");
    } else {
      note_output_text(m, o.out, csv);
    }
    finish(m, timer, o.out + ".manifest.json");
  }
  return 0;
}

int cmd_evaluate(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "evaluate";
  m.seeds["seed"] = o.seed;

  CrossValidateConfig cfg;
  cfg.folds = o.folds;
  cfg.seed = o.seed;
  cfg.threshold = o.threshold;
  cfg.sigma = o.sigma;

  CvReport report;
  if (!o.profile.empty()) {
    std::vector<ScenarioSpec> specs = benchmark_corpus(o.profile, o.seed);
    cfg.grid = specs.front().scene.grid;
    std::vector<EvalItem> items = corpus_eval_items(specs, o.jobs);
    std::size_t pos = 0;
    for (const EvalItem& it : items) pos += it.label == 1 ? 1 : 0;
    std::printf("profile %s: %zu individuals (%zu at risk) across %zu videos\n",
                o.profile.c_str(), items.size(), pos, specs.size());
    report = cross_validate(items, cfg);
  } else if (fs::is_directory(o.in)) {
    if (o.config.empty() || o.labels.empty()) {
      throw Error(ErrorKind::Data,
                  "stream-directory evaluation needs --config and --labels");
    }
    m.configs["scene"] = o.config;
    note_input(m, o.config);
    note_input(m, o.labels);
    SceneConfig scene = load_scene(o.config);
    cfg.grid = scene.grid;
    LabelMap labels = load_labels(o.labels);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(o.in)) {
      if (entry.path().extension() == ".ndjson") {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorKind::Data, o.in + ": no .ndjson files");
    std::vector<PersonTimeline> timelines;
    for (const std::string& f : files) {
      note_input(m, f);
      for (PersonTimeline& tl : load_stream(f, video_id_of(f))) {
        timelines.push_back(std::move(tl));
      }
    }
    apply_labels(timelines, labels);
    report = cross_validate(stream_eval_items(scene, timelines), cfg);
  } else {
    note_input(m, o.in);
    std::vector<IndicatorRow> rows = load_indicator_csv(o.in);
    report = cross_validate_fixed(rows, cfg);
  }

  std::fputs(report_table(report).c_str(), stdout);
  if (!o.out.empty()) {
    note_output_text(m, o.out + ".json", report_to_json_text(report));
    note_output_text(m, o.out + ".txt", report_table(report));
    finish(m, timer, o.out + ".manifest.json");
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  Timer timer;
  RunManifest m;
  m.command = "simulate";
  m.seeds["seed"] = o.seed;

  std::vector<ScenarioSpec> specs = benchmark_corpus(o.profile, o.seed);
  fs::create_directories(o.out);

  // Wave-batched so memory stays bounded while scenarios still generate in
  // parallel; files always land in corpus order.
  std::size_t batch = static_cast<std::size_t>(std::clamp(o.jobs, 1, 256));
  for (std::size_t base = 0; base < specs.size(); base += batch) {
    std::size_t n = std::min(batch, specs.size() - base);
    std::vector<ScenarioResult> results(n);
    if (n == 1) {
      results[0] = generate(specs[base]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n);
      for (std::size_t t = 0; t < n; ++t) {
        pool.emplace_back(
            [&, t] { results[t] = generate(specs[base + t]); });
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t t = 0; t < n; ++t) {
      const ScenarioResult& r = results[t];
      std::string prefix = (fs::path(o.out) / r.video_id).string();
      note_output_text(m, prefix + ".stream.ndjson",
                       serialize_stream(r.stream));
      note_output_text(m, prefix + ".scene.json", scene_to_json_text(r.scene));
      note_output_text(m, prefix + ".truth.json", truth_to_json_text(r));
      save_labels(r.labels, prefix + ".labels.csv");
      note_output_file(m, prefix + ".labels.csv");
    }
  }
  std::printf("wrote %zu scenarios to %s\n", specs.size(), o.out.c_str());
  finish(m, timer, (fs::path(o.out) / "manifest.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metro platform risk analytics pipeline"};
  app.require_subcommand(1);
  CommonOpts o;

  auto* calibrate =
      app.add_subcommand("calibrate", "estimate the homography from point pairs");
  calibrate->add_option("--config", o.config, "base scene JSON")->required();
  calibrate->add_option("--in", o.in, "correspondence CSV: src_x,src_y,dst_x,dst_y")
      ->required();
  calibrate->add_option("--out", o.out, "output scene JSON")->required();

  auto* zones = app.add_subcommand("zones", "build the platform zone partition");
  zones->add_option("--config", o.config, "scene JSON")->required();
  zones->add_option("--out", o.out, "output partition JSON")->required();
  zones->add_option("--overlay", o.overlay, "optional zone overlay PGM");
  zones->add_option("--offset", o.offset, "override offset_d (image units)");
  zones->add_option("--alpha", o.alpha, "override alpha");
  zones->add_option("--beta", o.beta, "override beta");

  auto* heatmap =
      app.add_subcommand("heatmap", "accumulate and aggregate trajectory maps");
  heatmap->add_option("--config", o.config, "scene JSON")->required();
  heatmap->add_option("--in", o.in, "perception stream NDJSON")->required();
  heatmap->add_option("--out", o.out, "output prefix (.pgm/.csv/.json)")
      ->required();
  heatmap->add_option("--sigma", o.sigma, "smoothing sigma, meters");
  heatmap->add_option("--labels", o.labels, "labels CSV");
  heatmap->add_flag("--at-risk-only", o.at_risk_only,
                    "aggregate only label=1 persons");

  auto* indicators =
      app.add_subcommand("indicators", "compute per-person indicator vectors");
  indicators->add_option("--config", o.config, "scene JSON")->required();
  indicators->add_option("--in", o.in, "perception stream NDJSON")->required();
  indicators->add_option("--out", o.out, "output indicator CSV")->required();
  indicators->add_option("--map", o.map, "normalized position-risk grid CSV");
  indicators->add_option("--labels", o.labels, "labels CSV");
  indicators->add_option("--tau", o.tau, "window length in frames (0 = whole)");
  indicators->add_option("--stride", o.stride, "window stride in frames");
  indicators->add_option("--hysteresis", o.hysteresis,
                         "debounce frames for zone/yellow transitions");
  indicators->add_option("--lt-min-events", o.lt_min_events,
                         "gaze runs needed to set LT");

  auto* train = app.add_subcommand("train", "fit the boosted risk model");
  train->add_option("--in", o.in, "labeled indicator CSV")->required();
  train->add_option("--out", o.out, "output model JSON")->required();
  train->add_option("--seed", o.seed, "training seed");

  auto* score = app.add_subcommand("score", "score persons with a trained model");
  score->add_option("--in", o.in, "indicator CSV")->required();
  score->add_option("--model", o.model, "model JSON")->required();
  score->add_option("--out", o.out, "optional scores CSV");
  score->add_option("--threshold", o.threshold, "decision threshold");
  score->add_flag("--explain", o.explain, "print Shapley attributions");

  auto* explain =
      app.add_subcommand("explain", "Shapley attributions for every row");
  explain->add_option("--in", o.in, "indicator CSV")->required();
  explain->add_option("--model", o.model, "model JSON")->required();
  explain->add_option("--out", o.out, "optional explanations JSON");
  explain->add_option("--threshold", o.threshold, "decision threshold");

  auto* evaluate =
      app.add_subcommand("evaluate", "grouped cross-validation report");
  auto* eval_in =
      evaluate->add_option("--in", o.in, "indicator CSV or stream directory");
  auto* eval_profile =
      evaluate->add_option("--profile", o.profile, "synthetic corpus profile");
  eval_profile->excludes(eval_in);
  evaluate->add_option("--config", o.config, "scene JSON (stream mode)");
  evaluate->add_option("--labels", o.labels, "labels CSV (stream mode)");
  evaluate->add_option("--seed", o.seed, "corpus and protocol seed");
  evaluate->add_option("--folds", o.folds, "fold count");
  evaluate->add_option("--threshold", o.threshold, "decision threshold");
  evaluate->add_option("--sigma", o.sigma, "per-fold map smoothing sigma");
  evaluate->add_option("--jobs", o.jobs, "parallel scenario generation");
  evaluate->add_option("--out", o.out, "report prefix (.json/.txt)");

  auto* simulate =
      app.add_subcommand("simulate", "write a synthetic scenario corpus");
  simulate->add_option("--profile", o.profile, "smoke or paper-shaped")
      ->default_val("smoke");
  simulate->add_option("--out", o.out, "output directory")->required();
  simulate->add_option("--seed", o.seed, "corpus seed");
  simulate->add_option("--jobs", o.jobs, "parallel scenario generation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(o);
    if (zones->parsed()) return cmd_zones(o);
    if (heatmap->parsed()) return cmd_heatmap(o);
    if (indicators->parsed()) return cmd_indicators(o);
    if (train->parsed()) return cmd_train(o);
    if (score->parsed()) return score_like(o, false, "score");
    if (explain->parsed()) return score_like(o, true, "explain");
    if (evaluate->parsed()) return cmd_evaluate(o);
    if (simulate->parsed()) return cmd_simulate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
