#pragma once

#include <string>

#include "wld/dataset.hpp"

namespace wld {

/// Writes `columns.csv`, `objects.csv` and `features.coo` into `dir`
/// (created if needed). Views are written as standalone datasets.
void save_dataset(const Dataset& data, const std::string& dir);

/// Throws IoError when files are missing, FormatError when malformed.
Dataset load_dataset(const std::string& dir);

/// Loads from in-memory file contents (used for uploads).
Dataset parse_dataset(const std::string& columns_csv, const std::string& objects_csv, const std::string& features_coo);

/// SHA-256 over the three files, hex encoded.
std::string dataset_digest(const std::string& dir);
std::string dataset_digest(const std::string& columns_csv, const std::string& objects_csv,
                           const std::string& features_coo);

}  // namespace wld
