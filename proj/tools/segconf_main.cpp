// Command-line surface for the confidence assessment pipeline:
//   synth       generate a deterministic synthetic scene
//   assess      confidence raster, segment table, flags, refined labels
//   eval-seg    segment-level report (IoU, confidence-IoU correlation)
//   eval-pixel  pixel-level report (histograms, distribution metrics, AUROC)
//   report      abstention overlay figure for a label raster

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "segconf/errors.hpp"
#include "segconf/manifest.hpp"
#include "segconf/pipeline.hpp"
#include "segconf/report_io.hpp"
#include "segconf/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace segconf;

namespace {

struct ConfigFlags {
  double eta = 0.9;
  double tau = 0.2;
  int connectivity = 4;
  std::string agg = "mean";
  std::string region = "inner";
  std::string refine_mode = "segment";
  int bins = 100;
  std::string baseline = "fused";
  bool no_gradient = false;
  std::string seg_iou = "adjusted";
  std::string correlation = "pearson";
  std::string border_policy = "outside";
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--eta", f.eta, "Coverage probability threshold (default 0.9)");
  cmd->add_option("--tau", f.tau, "Confidence threshold for flagging/abstention (default 0.2)");
  cmd->add_option("--connectivity", f.connectivity, "Component adjacency: 4 or 8")
      ->check(CLI::IsMember({4, 8}));
  cmd->add_option("--agg", f.agg, "Segment aggregation: mean or median")
      ->check(CLI::IsMember({"mean", "median"}));
  cmd->add_option("--region", f.region, "Aggregation region: inner or whole")
      ->check(CLI::IsMember({"inner", "whole"}));
  cmd->add_option("--refine-mode", f.refine_mode, "Refinement: segment, pixel, or off")
      ->check(CLI::IsMember({"segment", "pixel", "off"}));
  cmd->add_option("--bins", f.bins, "Histogram bin count (default 100)");
  cmd->add_option("--baseline", f.baseline, "Pipeline: fused or softmax (probability-only)")
      ->check(CLI::IsMember({"fused", "softmax"}));
  cmd->add_flag("--no-gradient", f.no_gradient, "Exclude the gradient statistic from fusion");
  cmd->add_option("--seg-iou", f.seg_iou, "Per-segment IoU construction: adjusted or plain")
      ->check(CLI::IsMember({"adjusted", "plain"}));
  cmd->add_option("--correlation", f.correlation, "Correlation flavor: pearson or spearman")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  cmd->add_option("--border-policy", f.border_policy,
                  "Image-border pixels in the inner split: outside or ignore")
      ->check(CLI::IsMember({"outside", "ignore"}));
}

PipelineConfig to_pipeline_config(const ConfigFlags& f) {
  PipelineConfig cfg;
  cfg.eta = f.eta;
  cfg.tau = f.tau;
  cfg.connectivity = f.connectivity == 8 ? Connectivity::eight : Connectivity::four;
  cfg.agg = f.agg == "median" ? Aggregation::median : Aggregation::mean;
  cfg.region = f.region == "whole" ? Region::whole : Region::inner;
  cfg.refine_mode = f.refine_mode == "off"     ? RefineMode::off
                    : f.refine_mode == "pixel" ? RefineMode::pixel
                                               : RefineMode::segment;
  cfg.bins = f.bins;
  cfg.baseline_softmax = f.baseline == "softmax";
  cfg.use_gradient = !f.no_gradient;
  cfg.adjusted_seg_iou = f.seg_iou != "plain";
  cfg.rank_correlation = f.correlation == "spearman";
  cfg.border_policy = f.border_policy == "ignore" ? BorderPolicy::ignore : BorderPolicy::outside;
  return cfg;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  if (text.empty()) return pairs;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      raise(ErrorKind::InvalidSpec, "confusion pair '" + item + "' must look like a:b");
    pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    pos = comma + 1;
  }
  return pairs;
}

void write_run_log(const fs::path& dir, const std::string& command) {
  // Timestamps live only here so every primary output stays byte-stable.
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json j;
  j["command"] = command;
  j["unix_millis"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  write_text_file(dir / "run_log.json", j.dump(2) + "\n");
}

struct LoadedInputs {
  ProbCube cube;
  std::optional<LabelRaster> gt;
  std::optional<FeatureCube> features;
};

LoadedInputs load_inputs(const std::string& cube_path, const std::string& gt_path,
                         const std::string& features_path) {
  ProbCube cube = load_cube(cube_path);
  std::optional<LabelRaster> gt;
  if (!gt_path.empty()) {
    gt = load_labels(gt_path, cube.classes());
    validate_alignment(cube, *gt);
  }
  std::optional<FeatureCube> features;
  if (!features_path.empty()) {
    features = load_features(features_path);
    require_same_shape(cube.height(), cube.width(), features->height(), features->width(),
                       "cube/features shape");
  }
  return LoadedInputs{std::move(cube), std::move(gt), std::move(features)};
}

int cmd_synth(const std::string& out_dir, const SceneSpec& spec) {
  fs::create_directories(out_dir);
  const Scene scene = generate(spec);
  const fs::path dir(out_dir);
  save_labels(scene.gt, dir / "gt.json");
  save_cube(scene.cube, dir / "cube.json");
  save_features(scene.features, dir / "features.json");

  json meta;
  meta["schema"] = "segconf-scene-1";
  meta["seed"] = spec.seed;
  meta["height"] = spec.height;
  meta["width"] = spec.width;
  meta["q"] = spec.q;
  meta["n_seeds"] = spec.n_seeds;
  meta["error_rate"] = spec.error_rate;
  meta["sharpness"] = spec.sharpness;
  meta["informative_confidence"] = spec.informative_confidence;
  meta["feature_depth"] = spec.feature_depth;
  json pairs = json::array();
  for (const auto& [a, b] : spec.confusion_pairs) pairs.push_back({a, b});
  meta["confusion_pairs"] = pairs;
  write_text_file(dir / "scene.json", meta.dump(2) + "\n");
  write_run_log(dir, "synth");
  return 0;
}

int cmd_assess(const std::string& cube_path, const std::string& gt_path,
               const std::string& features_path, const std::string& norm_in,
               const std::string& out_dir, const PipelineConfig& cfg) {
  LoadedInputs in = load_inputs(cube_path, gt_path, features_path);
  std::optional<NormalizationSpec> preset;
  if (!norm_in.empty()) preset = NormalizationSpec::load(norm_in);

  const AssessmentResult a =
      run_assessment(in.cube, in.features ? &*in.features : nullptr, in.gt ? &*in.gt : nullptr,
                     cfg, preset ? &*preset : nullptr);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_stat(a.confidence.pixel_conf, dir / "confidence.json");
  save_labels(a.refined, dir / "refined.json");
  save_labels(a.prediction, dir / "prediction.json");
  save_segment_table_csv(a.segmap, a.table, dir / "segments.csv", &a.confidence);
  save_segment_table_json(a.segmap, dir / "segments.json");
  save_segment_ids(a.segmap.ids(), a.segmap.height(), a.segmap.width(), dir / "segment_ids.json");
  if (!cfg.baseline_softmax) a.norm.save(dir / "normalization.json");
  write_text_file(dir / "config.json", config_to_json(cfg));
  write_run_log(dir, "assess");
  return 0;
}

int cmd_eval(const std::string& cube_path, const std::string& gt_path,
             const std::string& features_path, const std::string& out_dir,
             const PipelineConfig& cfg, bool segment_tier) {
  if (gt_path.empty()) raise(ErrorKind::MissingFile, "eval requires --gt");
  LoadedInputs in = load_inputs(cube_path, gt_path, features_path);
  const AssessmentResult a = run_assessment(
      in.cube, in.features ? &*in.features : nullptr, &*in.gt, cfg, nullptr);
  const EvalOutput eval = evaluate_scene(a, *in.gt, cfg);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  if (segment_tier) {
    save_eval_report(eval.report, cfg, dir / "seg_report.json");
    save_segment_table_csv(a.segmap, a.table, dir / "segments.csv", &a.confidence,
                           &eval.seg_ious);
  } else {
    save_eval_report(eval.report, cfg, dir / "pixel_report.json");
    save_histogram_csv(eval.histogram, dir / "histogram.csv");
    save_histogram_svg(eval.histogram,
                       cfg.baseline_softmax ? "confidence histogram (softmax baseline)"
                                            : "confidence histogram (fused metric)",
                       dir / "histogram.svg");
  }
  write_run_log(dir, segment_tier ? "eval-seg" : "eval-pixel");
  return 0;
}

int cmd_report(const std::string& labels_path, const std::string& out_path,
               const std::string& title) {
  const LabelRaster labels = load_labels(labels_path);
  const fs::path out(out_path);
  if (out.parent_path() != fs::path()) fs::create_directories(out.parent_path());
  save_label_overlay_svg(labels, title, out);

  // Sidecar summary: per-class pixel counts plus the sentinels.
  json summary;
  summary["schema"] = "segconf-overlay-1";
  std::map<std::string, int64_t> tally;
  for (int c = 0; c < labels.classes().count(); ++c) tally[labels.classes().name(c)] = 0;
  int64_t abstained = 0, nodata = 0;
  for (size_t i = 0; i < labels.values().size(); ++i) {
    const int v = labels.values()[i];
    if (v == labels.classes().abstain_index()) ++abstained;
    else if (v == labels.classes().nodata_index()) ++nodata;
    else tally[labels.classes().name(v)] += 1;
  }
  summary["class_pixels"] = tally;
  summary["abstained"] = abstained;
  summary["nodata"] = nodata;
  fs::path summary_path = out;
  summary_path.replace_extension(".summary.json");
  write_text_file(summary_path, summary.dump(2) + "\n");
  return 0;
}

int error_out(ErrorKind kind, const std::string& message) {
  json err;
  err["error"] = {{"kind", error_kind_name(kind)},
                  {"message", message},
                  {"exit_code", error_exit_code(kind)}};
  std::cerr << err.dump() << "\n";
  return error_exit_code(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-level confidence assessment for semantic segmentation rasters"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic scene");
  std::string synth_out;
  SceneSpec spec;
  std::string confusion_text;
  bool uninformative = false;
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", spec.seed, "PRNG seed");
  synth_cmd->add_option("--height", spec.height, "Scene height in pixels");
  synth_cmd->add_option("--width", spec.width, "Scene width in pixels");
  synth_cmd->add_option("--classes", spec.q, "Class count q");
  synth_cmd->add_option("--sites", spec.n_seeds, "Voronoi site count");
  synth_cmd->add_option("--error-rate", spec.error_rate, "Target pixel error fraction");
  synth_cmd->add_option("--confusion", confusion_text, "Near-class pairs, e.g. 1:2,4:5");
  synth_cmd->add_option("--sharpness", spec.sharpness, "Inverse softmax temperature");
  synth_cmd->add_flag("--uninformative", uninformative,
                      "Errors draw the same confidence law as correct pixels");
  synth_cmd->add_option("--feature-depth", spec.feature_depth, "Feature vector length");

  // assess
  auto* assess_cmd = app.add_subcommand("assess", "Assign confidence, flag and refine");
  std::string cube_path, gt_path, features_path, norm_in, out_dir;
  ConfigFlags flags;
  assess_cmd->add_option("--cube", cube_path, "Probability cube manifest")->required();
  assess_cmd->add_option("--gt", gt_path, "Ground-truth manifest (enables nodata masking)");
  assess_cmd->add_option("--features", features_path, "Feature cube manifest");
  assess_cmd->add_option("--norm-in", norm_in, "Reuse a saved normalization spec");
  assess_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_config_flags(assess_cmd, flags);

  // eval-seg / eval-pixel
  auto* eval_seg_cmd = app.add_subcommand("eval-seg", "Segment-level evaluation");
  auto* eval_pixel_cmd = app.add_subcommand("eval-pixel", "Pixel-level evaluation");
  std::string es_cube, es_gt, es_features, es_out;
  ConfigFlags es_flags;
  std::string ep_cube, ep_gt, ep_features, ep_out;
  ConfigFlags ep_flags;
  eval_seg_cmd->add_option("--cube", es_cube, "Probability cube manifest")->required();
  eval_seg_cmd->add_option("--gt", es_gt, "Ground-truth manifest")->required();
  eval_seg_cmd->add_option("--features", es_features, "Feature cube manifest");
  eval_seg_cmd->add_option("--out", es_out, "Output directory")->required();
  add_config_flags(eval_seg_cmd, es_flags);
  eval_pixel_cmd->add_option("--cube", ep_cube, "Probability cube manifest")->required();
  eval_pixel_cmd->add_option("--gt", ep_gt, "Ground-truth manifest")->required();
  eval_pixel_cmd->add_option("--features", ep_features, "Feature cube manifest");
  eval_pixel_cmd->add_option("--out", ep_out, "Output directory")->required();
  add_config_flags(eval_pixel_cmd, ep_flags);

  // report
  auto* report_cmd = app.add_subcommand("report", "Abstention overlay figure for labels");
  std::string report_labels, report_out, report_title = "label map";
  report_cmd->add_option("--labels", report_labels, "Label manifest (e.g. refined.json)")
      ->required();
  report_cmd->add_option("--out", report_out, "Output SVG path")->required();
  report_cmd->add_option("--title", report_title, "Figure title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_out(ErrorKind::InvalidSpec, e.what());
  }

  try {
    if (synth_cmd->parsed()) {
      spec.informative_confidence = !uninformative;
      spec.confusion_pairs = parse_pairs(confusion_text);
      return cmd_synth(synth_out, spec);
    }
    if (assess_cmd->parsed())
      return cmd_assess(cube_path, gt_path, features_path, norm_in, out_dir,
                        to_pipeline_config(flags));
    if (eval_seg_cmd->parsed())
      return cmd_eval(es_cube, es_gt, es_features, es_out, to_pipeline_config(es_flags), true);
    if (eval_pixel_cmd->parsed())
      return cmd_eval(ep_cube, ep_gt, ep_features, ep_out, to_pipeline_config(ep_flags), false);
    if (report_cmd->parsed()) return cmd_report(report_labels, report_out, report_title);
  } catch (const Error& e) {
    return error_out(e.kind(), e.what());
  } catch (const std::exception& e) {
    return error_out(ErrorKind::InvalidSpec, e.what());
  }
  return 0;
}
