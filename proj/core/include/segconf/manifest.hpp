#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "segconf/raster.hpp"

namespace segconf {

// All rasters travel as a JSON sidecar manifest plus a headerless row-major
// little-endian binary payload referenced by relative path. Manifest keys for
// probability cubes and label rasters:
//   {"dtype","shape","layout","endianness","payload","classes","nodata","abstain"}
// Feature cubes drop the class fields; stat rasters carry "kind" instead and
// use a fixed quiet-NaN bit pattern for invalid pixels.

ProbCube load_cube(const std::filesystem::path& manifest_path);

LabelRaster load_labels(const std::filesystem::path& manifest_path);
// Cross-checks the manifest's class fields against the expected set.
LabelRaster load_labels(const std::filesystem::path& manifest_path, const ClassSet& expected);

FeatureCube load_features(const std::filesystem::path& manifest_path);
StatRaster load_stat(const std::filesystem::path& manifest_path);

void save_cube(const ProbCube& cube, const std::filesystem::path& manifest_path);
void save_labels(const LabelRaster& labels, const std::filesystem::path& manifest_path);
void save_features(const FeatureCube& features, const std::filesystem::path& manifest_path);
void save_stat(const StatRaster& stat, const std::filesystem::path& manifest_path);

// Segment-id raster (u32, one id per pixel, kNoSegmentId for excluded pixels).
void save_segment_ids(const std::vector<uint32_t>& ids, int height, int width,
                      const std::filesystem::path& manifest_path);
std::vector<uint32_t> load_segment_ids(const std::filesystem::path& manifest_path,
                                       int* height, int* width);

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, const void* data, size_t bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace segconf
