#pragma once

#include <string>
#include <vector>

#include "wld/dataset.hpp"
#include "wld/extent.hpp"

namespace toy {

std::string data_path(const std::string& relative);
std::string sample_query_raw();
std::string sample_query_fixed();

/// The 11-object toy dataset loaded from data/toy.
const wld::Dataset& dataset();

wld::Target time_target();  // numeric attribute `time`
wld::Target slow_target();  // boolean attribute `slow`

/// Object ids of an extent, in object order.
std::vector<std::string> ids(const wld::Extent& e);
/// Extent from object ids ("o1".."o11").
wld::Extent extent_of(const std::vector<std::string>& ids);

}  // namespace toy
