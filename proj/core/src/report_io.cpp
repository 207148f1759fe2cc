#include "segconf/report_io.hpp"

#include <algorithm>
#include <charconv>

#include <json.hpp>

#include "segconf/errors.hpp"
#include "segconf/manifest.hpp"

namespace segconf {

using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "segconf-report-1";

const char* connectivity_name(Connectivity c) { return c == Connectivity::four ? "4" : "8"; }

const char* refine_mode_name(RefineMode m) {
  switch (m) {
    case RefineMode::off: return "off";
    case RefineMode::pixel: return "pixel";
    case RefineMode::segment: return "segment";
  }
  return "segment";
}

json metrics_to_json(const DistributionMetrics& m) {
  return json{{"wasserstein", m.wasserstein}, {"js", m.js},           {"kl_fwd", m.kl_fwd},
              {"kl_rev", m.kl_rev},           {"overlap_pct", m.overlap_pct},
              {"euclidean", m.euclidean}};
}

json config_json(const PipelineConfig& cfg) {
  json j;
  j["eta"] = cfg.eta;
  j["tau"] = cfg.tau;
  j["connectivity"] = connectivity_name(cfg.connectivity);
  j["agg"] = aggregation_name(cfg.agg);
  j["region"] = region_name(cfg.region);
  j["refine_mode"] = refine_mode_name(cfg.refine_mode);
  j["bins"] = cfg.bins;
  j["baseline"] = cfg.baseline_softmax ? "softmax" : "fused";
  j["use_gradient"] = cfg.use_gradient;
  j["adjusted_seg_iou"] = cfg.adjusted_seg_iou;
  j["rank_correlation"] = cfg.rank_correlation;
  j["border_policy"] = cfg.border_policy == BorderPolicy::outside ? "outside" : "ignore";
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string config_to_json(const PipelineConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string eval_report_to_json(const EvalReport& report, const PipelineConfig& cfg) {
  json j;
  j["schema"] = kReportSchema;
  j["config"] = config_json(cfg);
  j["iou"] = json{{"macro", report.macro_iou}};
  json per_class = json::object();
  for (const auto& [c, v] : report.per_class_iou) per_class[std::to_string(c)] = v;
  j["iou"]["per_class"] = per_class;
  j["correlation"] = json{{"pearson_r", report.pearson_r},
                          {"n_segments_scored", report.n_segments_scored}};
  j["auroc"] = report.auroc;
  j["distribution"] = json{{"density", metrics_to_json(report.density_metrics)},
                           {"counts", metrics_to_json(report.count_metrics)}};
  j["pixel_counts"] = json{{"n_correct", report.counts.n_correct},
                           {"n_incorrect", report.counts.n_incorrect},
                           {"n_abstained", report.counts.n_abstained},
                           {"n_nodata", report.counts.n_nodata}};
  return j.dump(2) + "\n";
}

void save_eval_report(const EvalReport& report, const PipelineConfig& cfg,
                      const std::filesystem::path& path) {
  write_text_file(path, eval_report_to_json(report, cfg));
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "# schema: segconf-histogram-1\n";
  out += "bin_lo,bin_hi,count_correct,count_incorrect,density_correct,density_incorrect\n";
  for (int i = 0; i < h.bin_count; ++i) {
    out += format_double(h.bin_lo(i));
    out += ',';
    out += format_double(h.bin_hi(i));
    out += ',';
    out += std::to_string(h.counts_correct[static_cast<size_t>(i)]);
    out += ',';
    out += std::to_string(h.counts_incorrect[static_cast<size_t>(i)]);
    out += ',';
    out += format_double(h.density_correct[static_cast<size_t>(i)]);
    out += ',';
    out += format_double(h.density_incorrect[static_cast<size_t>(i)]);
    out += '\n';
  }
  return out;
}

void save_histogram_csv(const Histogram& h, const std::filesystem::path& path) {
  write_text_file(path, histogram_to_csv(h));
}

std::string histogram_to_svg(const Histogram& h, const std::string& title) {
  const int width = 800, height = 420;
  const int left = 50, right = 20, top = 40, bottom = 40;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  double max_density = 0.0;
  for (int i = 0; i < h.bin_count; ++i) {
    max_density = std::max(max_density, h.density_correct[static_cast<size_t>(i)]);
    max_density = std::max(max_density, h.density_incorrect[static_cast<size_t>(i)]);
  }
  if (max_density <= 0.0) max_density = 1.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  const double bar_w = plot_w / h.bin_count;
  auto bar = [&](int i, double density, const char* color, double shift) {
    if (density <= 0.0) return std::string();
    const double x = left + i * bar_w + shift;
    const double bh = density / max_density * plot_h;
    const double y = top + (plot_h - bh);
    return "<rect x=\"" + format_double(x) + "\" y=\"" + format_double(y) + "\" width=\"" +
           format_double(bar_w * 0.46) + "\" height=\"" + format_double(bh) + "\" fill=\"" +
           color + "\" fill-opacity=\"0.85\"/>\n";
  };
  for (int i = 0; i < h.bin_count; ++i) {
    svg += bar(i, h.density_correct[static_cast<size_t>(i)], "#2b7bba", 0.0);
    svg += bar(i, h.density_incorrect[static_cast<size_t>(i)], "#d1495b", bar_w * 0.48);
  }

  // axes and legend
  svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" + format_double(top + plot_h) +
         "\" x2=\"" + format_double(left + plot_w) + "\" y2=\"" + format_double(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top) + "\" x2=\"" +
         std::to_string(left) + "\" y2=\"" + format_double(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 10; t += 2) {
    const double x = left + plot_w * t / 10.0;
    svg += "<text x=\"" + format_double(x) + "\" y=\"" + format_double(top + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_double(t / 10.0) + "</text>\n";
  }
  svg += "<rect x=\"" + format_double(left + plot_w - 170) + "\" y=\"" + std::to_string(top) +
         "\" width=\"12\" height=\"12\" fill=\"#2b7bba\"/>\n";
  svg += "<text x=\"" + format_double(left + plot_w - 152) + "\" y=\"" + std::to_string(top + 11) +
         "\" font-family=\"sans-serif\" font-size=\"12\">correct</text>\n";
  svg += "<rect x=\"" + format_double(left + plot_w - 170) + "\" y=\"" + std::to_string(top + 18) +
         "\" width=\"12\" height=\"12\" fill=\"#d1495b\"/>\n";
  svg += "<text x=\"" + format_double(left + plot_w - 152) + "\" y=\"" + std::to_string(top + 29) +
         "\" font-family=\"sans-serif\" font-size=\"12\">incorrect</text>\n";
  svg += "</svg>\n";
  return svg;
}

void save_histogram_svg(const Histogram& h, const std::string& title,
                        const std::filesystem::path& path) {
  write_text_file(path, histogram_to_svg(h, title));
}

std::string segment_table_to_csv(const SegmentMap& segmap, const SegmentStatTable& table,
                                 const ConfidenceResult* result,
                                 const std::map<uint32_t, double>* seg_ious) {
  // Collect the aggregate columns actually present, in a fixed kind order.
  std::vector<StatKind> kinds;
  for (StatKind kind : {StatKind::margin, StatKind::neg_entropy, StatKind::gradient,
                        StatKind::coverage, StatKind::confidence, StatKind::other}) {
    for (const auto& row : table.rows()) {
      if (row.aggregates.count(kind)) {
        kinds.push_back(kind);
        break;
      }
    }
  }

  std::string out = "# schema: segconf-segments-1\n";
  out += "id,class,size,inner_size,coverage";
  for (StatKind kind : kinds) out += std::string(",") + stat_kind_name(kind);
  out += ",region_used";
  if (result != nullptr) out += ",confidence,flag";
  if (seg_ious != nullptr) out += ",iou";
  out += '\n';

  for (uint32_t id = 0; id < segmap.segment_count(); ++id) {
    const SegmentRecord& rec = segmap.segment(id);
    const SegmentStatRow& row = table.row(id);
    out += std::to_string(id);
    out += ',' + std::to_string(rec.class_index);
    out += ',' + std::to_string(rec.size);
    out += ',' + std::to_string(rec.inner_size);
    out += ',' + (table.has_coverage() ? format_double(row.coverage) : std::string(""));
    for (StatKind kind : kinds) {
      auto it = row.aggregates.find(kind);
      out += ',' + (it != row.aggregates.end() ? format_double(it->second) : std::string(""));
    }
    out += ',' + std::string(region_name(row.region_used));
    if (result != nullptr) {
      out += ',' + format_double(result->segment_conf[id]);
      out += ',' + std::string(result->flags[id] == SegmentFlag::predicted_incorrect
                                   ? "predicted_incorrect"
                                   : "predicted_correct");
    }
    if (seg_ious != nullptr) {
      auto it = seg_ious->find(id);
      out += ',' + (it != seg_ious->end() ? format_double(it->second) : std::string(""));
    }
    out += '\n';
  }
  return out;
}

void save_segment_table_csv(const SegmentMap& segmap, const SegmentStatTable& table,
                            const std::filesystem::path& path, const ConfidenceResult* result,
                            const std::map<uint32_t, double>* seg_ious) {
  write_text_file(path, segment_table_to_csv(segmap, table, result, seg_ious));
}

std::string segment_table_to_json(const SegmentMap& segmap) {
  json arr = json::array();
  for (const auto& rec : segmap.segments()) {
    arr.push_back(json{{"id", rec.id},
                       {"class", rec.class_index},
                       {"size", rec.size},
                       {"inner_size", rec.inner_size},
                       {"bbox", {rec.row0, rec.col0, rec.row1, rec.col1}}});
  }
  json j;
  j["schema"] = "segconf-segments-1";
  j["count"] = segmap.segment_count();
  j["segments"] = arr;
  return j.dump(2) + "\n";
}

void save_segment_table_json(const SegmentMap& segmap, const std::filesystem::path& path) {
  write_text_file(path, segment_table_to_json(segmap));
}

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
                          "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
constexpr int kPaletteSize = 12;

}  // namespace

std::string label_overlay_svg(const LabelRaster& labels, const std::string& title) {
  const int h = labels.height();
  const int w = labels.width();
  const int cell = std::max(1, 512 / std::max(1, std::max(h, w)));
  const int legend_w = 150;
  const int top = 30;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w * cell + legend_w) + "\" height=\"" +
         std::to_string(std::max(h * cell + top, top + 20 * (labels.classes().count() + 2))) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"8\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" + title +
         "</text>\n";

  auto color_of = [&](int v) -> std::string {
    if (v == labels.classes().abstain_index()) return "#000000";
    if (v == labels.classes().nodata_index()) return "#d9d9d9";
    return kPalette[v % kPaletteSize];
  };

  // Row-run rectangles keep the file small on uniform regions.
  for (int r = 0; r < h; ++r) {
    int c = 0;
    while (c < w) {
      const int v = labels.at(r, c);
      int end = c + 1;
      while (end < w && labels.at(r, end) == v) ++end;
      svg += "<rect x=\"" + std::to_string(c * cell) + "\" y=\"" + std::to_string(top + r * cell) +
             "\" width=\"" + std::to_string((end - c) * cell) + "\" height=\"" +
             std::to_string(cell) + "\" fill=\"" + color_of(v) + "\"/>\n";
      c = end;
    }
  }

  // Legend
  int ly = top;
  auto legend_entry = [&](const std::string& color, const std::string& name) {
    svg += "<rect x=\"" + std::to_string(w * cell + 10) + "\" y=\"" + std::to_string(ly) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + std::to_string(w * cell + 28) + "\" y=\"" + std::to_string(ly + 11) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + name + "</text>\n";
    ly += 20;
  };
  for (int cidx = 0; cidx < labels.classes().count(); ++cidx)
    legend_entry(kPalette[cidx % kPaletteSize], labels.classes().name(cidx));
  legend_entry("#000000", "abstain");
  legend_entry("#d9d9d9", "nodata");
  svg += "</svg>\n";
  return svg;
}

void save_label_overlay_svg(const LabelRaster& labels, const std::string& title,
                            const std::filesystem::path& path) {
  write_text_file(path, label_overlay_svg(labels, title));
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "# schema: segconf-sweep-1\n";
  out +=
      "seed,height,width,q,error_rate,eta,tau,agg,region,refine_mode,baseline,"
      "macro_iou,pearson_r,auroc,wasserstein,js,overlap_pct\n";
  for (const auto& row : rows) {
    out += std::to_string(row.spec.seed);
    out += ',' + std::to_string(row.spec.height);
    out += ',' + std::to_string(row.spec.width);
    out += ',' + std::to_string(row.spec.q);
    out += ',' + format_double(row.spec.error_rate);
    out += ',' + format_double(row.config.eta);
    out += ',' + format_double(row.config.tau);
    out += ',' + std::string(aggregation_name(row.config.agg));
    out += ',' + std::string(region_name(row.config.region));
    out += ',' + std::string(refine_mode_name(row.config.refine_mode));
    out += ',' + std::string(row.config.baseline_softmax ? "softmax" : "fused");
    out += ',' + format_double(row.report.macro_iou);
    out += ',' + format_double(row.report.pearson_r);
    out += ',' + format_double(row.report.auroc);
    out += ',' + format_double(row.report.density_metrics.wasserstein);
    out += ',' + format_double(row.report.density_metrics.js);
    out += ',' + format_double(row.report.density_metrics.overlap_pct);
    out += '\n';
  }
  return out;
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json spec;
    spec["seed"] = row.spec.seed;
    spec["height"] = row.spec.height;
    spec["width"] = row.spec.width;
    spec["q"] = row.spec.q;
    spec["error_rate"] = row.spec.error_rate;
    json j;
    j["scene"] = spec;
    j["config"] = config_json(row.config);
    j["macro_iou"] = row.report.macro_iou;
    j["pearson_r"] = row.report.pearson_r;
    j["auroc"] = row.report.auroc;
    arr.push_back(j);
  }
  json out;
  out["schema"] = "segconf-sweep-1";
  out["rows"] = arr;
  return out.dump(2) + "\n";
}

}  // namespace segconf
