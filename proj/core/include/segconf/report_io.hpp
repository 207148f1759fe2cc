#pragma once

#include <filesystem>
#include <string>

#include "segconf/pipeline.hpp"
#include "segconf/synth.hpp"

namespace segconf {

// Shortest round-trip decimal form of a double (stable across runs).
std::string format_double(double v);

std::string config_to_json(const PipelineConfig& cfg);

// Full evaluation report: every segment- and pixel-level metric, the pixel
// counts, and the configuration that produced them. Schema-versioned.
std::string eval_report_to_json(const EvalReport& report, const PipelineConfig& cfg);
void save_eval_report(const EvalReport& report, const PipelineConfig& cfg,
                      const std::filesystem::path& path);

// Histogram CSV: bin_lo,bin_hi,count_correct,count_incorrect,density_correct,
// density_incorrect.
std::string histogram_to_csv(const Histogram& h);
void save_histogram_csv(const Histogram& h, const std::filesystem::path& path);

// Dependency-free SVG bar chart of the two confidence histograms.
std::string histogram_to_svg(const Histogram& h, const std::string& title);
void save_histogram_svg(const Histogram& h, const std::string& title,
                        const std::filesystem::path& path);

// Segment table CSV: id,class,size,inner_size,coverage,<aggregates>,
// region_used plus confidence/flag columns when a result is given and an iou
// column when per-segment IoUs are given.
std::string segment_table_to_csv(const SegmentMap& segmap, const SegmentStatTable& table,
                                 const ConfidenceResult* result = nullptr,
                                 const std::map<uint32_t, double>* seg_ious = nullptr);
void save_segment_table_csv(const SegmentMap& segmap, const SegmentStatTable& table,
                            const std::filesystem::path& path,
                            const ConfidenceResult* result = nullptr,
                            const std::map<uint32_t, double>* seg_ious = nullptr);

// JSON segment table mirroring the SegmentRecord fields.
std::string segment_table_to_json(const SegmentMap& segmap);
void save_segment_table_json(const SegmentMap& segmap, const std::filesystem::path& path);

// Label-map rendering with abstained pixels hatched black; row runs become
// rects so uniform regions stay compact.
std::string label_overlay_svg(const LabelRaster& labels, const std::string& title);
void save_label_overlay_svg(const LabelRaster& labels, const std::string& title,
                            const std::filesystem::path& path);

// Sweep results as CSV (one row per scene/config pair) and JSON.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

}  // namespace segconf
