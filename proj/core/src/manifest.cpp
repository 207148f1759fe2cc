#include "segconf/manifest.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "segconf/errors.hpp"

namespace segconf {

namespace {

using nlohmann::json;

// Invalid stat pixels are stored as this exact quiet-NaN pattern so payloads
// stay byte-deterministic.
constexpr uint32_t kStatNaNBits = 0x7FC00000u;

template <typename T>
void to_little_endian(std::vector<uint8_t>& out, const T* values, size_t count) {
  out.resize(count * sizeof(T));
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), values, out.size());
  } else {
    for (size_t i = 0; i < count; ++i) {
      T v = values[i];
      uint8_t b[sizeof(T)];
      std::memcpy(b, &v, sizeof(T));
      for (size_t k = 0; k < sizeof(T); ++k) out[i * sizeof(T) + k] = b[sizeof(T) - 1 - k];
    }
  }
}

template <typename T>
std::vector<T> from_little_endian(const std::vector<uint8_t>& bytes) {
  std::vector<T> out(bytes.size() / sizeof(T));
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
  } else {
    for (size_t i = 0; i < out.size(); ++i) {
      uint8_t b[sizeof(T)];
      for (size_t k = 0; k < sizeof(T); ++k) b[k] = bytes[i * sizeof(T) + sizeof(T) - 1 - k];
      std::memcpy(&out[i], b, sizeof(T));
    }
  }
  return out;
}

json parse_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    raise(ErrorKind::MissingFile, "manifest not found: " + path.string());
  std::ifstream in(path);
  if (!in) raise(ErrorKind::MissingFile, "cannot open manifest: " + path.string());
  json m = json::parse(in, nullptr, false);
  if (m.is_discarded())
    raise(ErrorKind::BadManifest, "manifest is not valid JSON: " + path.string());
  return m;
}

void check_common(const json& m, const std::string& want_dtype, size_t want_dims,
                  const std::filesystem::path& path) {
  for (const char* key : {"dtype", "shape", "layout", "endianness", "payload"}) {
    if (!m.contains(key))
      raise(ErrorKind::BadManifest, std::string("manifest missing key '") + key + "': " + path.string());
  }
  if (m["dtype"] != want_dtype)
    raise(ErrorKind::BadManifest,
          "expected dtype '" + want_dtype + "', got '" + m["dtype"].get<std::string>() + "'");
  if (!m["shape"].is_array() || m["shape"].size() != want_dims)
    raise(ErrorKind::BadManifest, "manifest shape must have " + std::to_string(want_dims) + " entries");
  if (m["layout"] != "row-major") raise(ErrorKind::BadManifest, "layout must be row-major");
  if (m["endianness"] != "little") raise(ErrorKind::BadManifest, "endianness must be little");
}

std::filesystem::path payload_path(const json& m, const std::filesystem::path& manifest_path) {
  return manifest_path.parent_path() / m["payload"].get<std::string>();
}

std::vector<uint8_t> read_payload(const json& m, const std::filesystem::path& manifest_path,
                                  size_t expected_bytes) {
  const auto path = payload_path(m, manifest_path);
  if (!std::filesystem::exists(path))
    raise(ErrorKind::MissingFile, "payload not found: " + path.string());
  auto bytes = read_binary_file(path);
  if (bytes.size() != expected_bytes)
    raise(ErrorKind::ShapeMismatch,
          "payload " + path.string() + " has " + std::to_string(bytes.size()) +
              " bytes, manifest implies " + std::to_string(expected_bytes));
  return bytes;
}

ClassSet class_set_from_manifest(const json& m, const std::filesystem::path& path) {
  for (const char* key : {"classes", "nodata", "abstain"}) {
    if (!m.contains(key))
      raise(ErrorKind::BadManifest, std::string("manifest missing key '") + key + "': " + path.string());
  }
  std::vector<std::string> names;
  for (const auto& n : m["classes"]) names.push_back(n.get<std::string>());
  return ClassSet(std::move(names), m["nodata"].get<int>(), m["abstain"].get<int>());
}

json class_fields(const ClassSet& classes) {
  json j;
  j["classes"] = classes.names();
  j["nodata"] = classes.nodata_index();
  j["abstain"] = classes.abstain_index();
  return j;
}

void write_manifest(const json& m, const std::filesystem::path& path) {
  write_text_file(path, m.dump(2) + "\n");
}

std::filesystem::path payload_name_for(const std::filesystem::path& manifest_path) {
  auto p = manifest_path;
  p.replace_extension(".bin");
  return p;
}

}  // namespace

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::MissingFile, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) raise(ErrorKind::IoFailure, "short read from " + path.string());
  return bytes;
}

void write_binary_file(const std::filesystem::path& path, const void* data, size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  if (bytes > 0) out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) raise(ErrorKind::IoFailure, "short write to " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_binary_file(path, text.data(), text.size());
}

ProbCube load_cube(const std::filesystem::path& manifest_path) {
  const json m = parse_manifest(manifest_path);
  check_common(m, "f32", 3, manifest_path);
  ClassSet classes = class_set_from_manifest(m, manifest_path);
  const int h = m["shape"][0].get<int>();
  const int w = m["shape"][1].get<int>();
  const int q = m["shape"][2].get<int>();
  if (q != classes.count())
    raise(ErrorKind::BadManifest, "shape[2] disagrees with the class list length");
  const size_t n = static_cast<size_t>(h) * w * q;
  auto bytes = read_payload(m, manifest_path, n * 4);
  return ProbCube::from_raw(h, w, std::move(classes), from_little_endian<float>(bytes));
}

LabelRaster load_labels(const std::filesystem::path& manifest_path) {
  const json m = parse_manifest(manifest_path);
  check_common(m, "u8", 2, manifest_path);
  ClassSet classes = class_set_from_manifest(m, manifest_path);
  const int h = m["shape"][0].get<int>();
  const int w = m["shape"][1].get<int>();
  auto bytes = read_payload(m, manifest_path, static_cast<size_t>(h) * w);
  return LabelRaster(h, w, std::move(classes), std::move(bytes));
}

LabelRaster load_labels(const std::filesystem::path& manifest_path, const ClassSet& expected) {
  LabelRaster r = load_labels(manifest_path);
  if (!(r.classes() == expected))
    raise(ErrorKind::ClassSetMismatch,
          "label manifest class set disagrees with the expected set: " + manifest_path.string());
  return r;
}

FeatureCube load_features(const std::filesystem::path& manifest_path) {
  const json m = parse_manifest(manifest_path);
  check_common(m, "f32", 3, manifest_path);
  const int h = m["shape"][0].get<int>();
  const int w = m["shape"][1].get<int>();
  const int d = m["shape"][2].get<int>();
  auto bytes = read_payload(m, manifest_path, static_cast<size_t>(h) * w * d * 4);
  return FeatureCube(h, w, d, from_little_endian<float>(bytes));
}

StatRaster load_stat(const std::filesystem::path& manifest_path) {
  const json m = parse_manifest(manifest_path);
  check_common(m, "f32", 2, manifest_path);
  if (!m.contains("kind")) raise(ErrorKind::BadManifest, "stat manifest missing 'kind'");
  const int h = m["shape"][0].get<int>();
  const int w = m["shape"][1].get<int>();
  auto bytes = read_payload(m, manifest_path, static_cast<size_t>(h) * w * 4);
  auto vals = from_little_endian<float>(bytes);
  StatRaster stat(h, w, stat_kind_from_name(m["kind"].get<std::string>()));
  if (m.value("omitted", false)) stat.mark_omitted();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const float v = vals[static_cast<size_t>(r) * w + c];
      if (std::isnan(v)) stat.invalidate(r, c);
      else stat.set(r, c, v);
    }
  }
  return stat;
}

void save_cube(const ProbCube& cube, const std::filesystem::path& manifest_path) {
  json m = class_fields(cube.classes());
  m["dtype"] = "f32";
  m["shape"] = {cube.height(), cube.width(), cube.class_count()};
  m["layout"] = "row-major";
  m["endianness"] = "little";
  const auto payload = payload_name_for(manifest_path);
  m["payload"] = payload.filename().string();
  std::vector<uint8_t> bytes;
  to_little_endian(bytes, cube.raw().data(), cube.raw().size());
  write_binary_file(payload, bytes.data(), bytes.size());
  write_manifest(m, manifest_path);
}

void save_labels(const LabelRaster& labels, const std::filesystem::path& manifest_path) {
  json m = class_fields(labels.classes());
  m["dtype"] = "u8";
  m["shape"] = {labels.height(), labels.width()};
  m["layout"] = "row-major";
  m["endianness"] = "little";
  const auto payload = payload_name_for(manifest_path);
  m["payload"] = payload.filename().string();
  write_binary_file(payload, labels.values().data(), labels.values().size());
  write_manifest(m, manifest_path);
}

void save_features(const FeatureCube& features, const std::filesystem::path& manifest_path) {
  json m;
  m["dtype"] = "f32";
  m["shape"] = {features.height(), features.width(), features.depth()};
  m["layout"] = "row-major";
  m["endianness"] = "little";
  const auto payload = payload_name_for(manifest_path);
  m["payload"] = payload.filename().string();
  std::vector<uint8_t> bytes;
  to_little_endian(bytes, features.raw().data(), features.raw().size());
  write_binary_file(payload, bytes.data(), bytes.size());
  write_manifest(m, manifest_path);
}

void save_stat(const StatRaster& stat, const std::filesystem::path& manifest_path) {
  json m;
  m["dtype"] = "f32";
  m["shape"] = {stat.height(), stat.width()};
  m["layout"] = "row-major";
  m["endianness"] = "little";
  m["kind"] = stat_kind_name(stat.kind());
  if (stat.omitted()) m["omitted"] = true;
  const auto payload = payload_name_for(manifest_path);
  m["payload"] = payload.filename().string();

  std::vector<float> vals(stat.values().size());
  for (size_t i = 0; i < vals.size(); ++i) {
    if (stat.valid_mask()[i]) {
      vals[i] = static_cast<float>(stat.values()[i]);
    } else {
      float nanv;
      uint32_t bits = kStatNaNBits;
      std::memcpy(&nanv, &bits, 4);
      vals[i] = nanv;
    }
  }
  std::vector<uint8_t> bytes;
  to_little_endian(bytes, vals.data(), vals.size());
  write_binary_file(payload, bytes.data(), bytes.size());
  write_manifest(m, manifest_path);
}

void save_segment_ids(const std::vector<uint32_t>& ids, int height, int width,
                      const std::filesystem::path& manifest_path) {
  json m;
  m["dtype"] = "u32";
  m["shape"] = {height, width};
  m["layout"] = "row-major";
  m["endianness"] = "little";
  m["kind"] = "segment_ids";
  const auto payload = payload_name_for(manifest_path);
  m["payload"] = payload.filename().string();
  std::vector<uint8_t> bytes;
  to_little_endian(bytes, ids.data(), ids.size());
  write_binary_file(payload, bytes.data(), bytes.size());
  write_manifest(m, manifest_path);
}

std::vector<uint32_t> load_segment_ids(const std::filesystem::path& manifest_path,
                                       int* height, int* width) {
  const json m = parse_manifest(manifest_path);
  check_common(m, "u32", 2, manifest_path);
  const int h = m["shape"][0].get<int>();
  const int w = m["shape"][1].get<int>();
  auto bytes = read_payload(m, manifest_path, static_cast<size_t>(h) * w * 4);
  if (height) *height = h;
  if (width) *width = w;
  return from_little_endian<uint32_t>(bytes);
}

}  // namespace segconf
