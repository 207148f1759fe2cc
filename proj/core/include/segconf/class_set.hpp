#pragma once

#include <string>
#include <vector>

namespace segconf {

// The class nomenclature shared by every raster in a scene: q class names
// plus two sentinel codes (nodata, abstain) that live outside 0..q-1.
class ClassSet {
 public:
  ClassSet(std::vector<std::string> names, int nodata_index, int abstain_index);

  int count() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const { return names_.at(static_cast<size_t>(index)); }
  int nodata_index() const { return nodata_index_; }
  int abstain_index() const { return abstain_index_; }

  bool is_class(int value) const { return value >= 0 && value < count(); }
  bool is_sentinel(int value) const {
    return value == nodata_index_ || value == abstain_index_;
  }
  bool is_valid_value(int value) const { return is_class(value) || is_sentinel(value); }

  bool operator==(const ClassSet& other) const = default;

  // Convenience for tests and the synthetic generator: classes "c0".."c{q-1}"
  // with the u8 sentinel convention nodata=255, abstain=254.
  static ClassSet generic(int q);

 private:
  std::vector<std::string> names_;
  int nodata_index_;
  int abstain_index_;
};

}  // namespace segconf
