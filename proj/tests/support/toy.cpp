#include "support/toy.hpp"

#include "wld/dataset_io.hpp"
#include "wld/text.hpp"

namespace toy {

std::string data_path(const std::string& relative) { return std::string(WLD_DATA_DIR) + "/" + relative; }

std::string sample_query_raw() { return wld::read_text_file(data_path("sample_query.sql")); }
std::string sample_query_fixed() { return wld::read_text_file(data_path("sample_query_fixed.sql")); }

const wld::Dataset& dataset() {
  static const wld::Dataset ds = wld::load_dataset(data_path("toy"));
  return ds;
}

wld::Target time_target() {
  return wld::derive_target(dataset(), {wld::TargetMode::NumericAttribute, "time", std::nullopt, {}});
}

wld::Target slow_target() {
  return wld::derive_target(dataset(), {wld::TargetMode::BooleanAttribute, "slow", std::nullopt, {}});
}

std::vector<std::string> ids(const wld::Extent& e) {
  std::vector<std::string> out;
  e.for_each([&](std::size_t i) { out.push_back(dataset().object_id(i)); });
  return out;
}

wld::Extent extent_of(const std::vector<std::string>& list) {
  wld::Extent e(dataset().size());
  for (const auto& id : list) e.set(dataset().object_index(id));
  return e;
}

}  // namespace toy
