#include "segconf/class_set.hpp"

#include <unordered_set>

#include "segconf/errors.hpp"

namespace segconf {

ClassSet::ClassSet(std::vector<std::string> names, int nodata_index, int abstain_index)
    : names_(std::move(names)), nodata_index_(nodata_index), abstain_index_(abstain_index) {
  const int q = count();
  if (q < 2) raise(ErrorKind::InvalidSpec, "class set needs at least 2 classes");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second)
      raise(ErrorKind::InvalidSpec, "duplicate class name '" + n + "'");
  }
  if (nodata_index_ == abstain_index_)
    raise(ErrorKind::InvalidSpec, "nodata and abstain sentinels must differ");
  if (is_class(nodata_index_) || is_class(abstain_index_))
    raise(ErrorKind::InvalidSpec, "sentinel collides with a class index");
}

ClassSet ClassSet::generic(int q) {
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(q));
  for (int i = 0; i < q; ++i) names.push_back("c" + std::to_string(i));
  return ClassSet(std::move(names), 255, 254);
}

}  // namespace segconf
