#include "wld/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>

#include "wld/csv.hpp"
#include "wld/digest.hpp"
#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

bool stored_sparse(const Attribute& a) { return a.source == Provenance::QueryToken && a.kind == AttributeKind::Numeric; }

std::string cell_text(const Dataset& d, std::size_t j, std::size_t i) {
  const Attribute& a = d.attribute(j);
  if (a.kind == AttributeKind::Numeric || a.kind == AttributeKind::Boolean) {
    double v = d.number(j, i);
    return std::isnan(v) ? std::string() : format_number(v);
  }
  std::int32_t c = d.code(j, i);
  return c < 0 ? std::string() : a.categories[static_cast<std::size_t>(c)];
}

}  // namespace

void save_dataset(const Dataset& data, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  std::string columns = "name,kind,domain,source\n";
  std::vector<std::string> object_header = {"object_id"};
  std::vector<std::size_t> dense;
  for (std::size_t j = 0; j < data.attribute_count(); ++j) {
    const Attribute& a = data.attribute(j);
    std::string domain;
    if (a.kind == AttributeKind::Boolean) {
      domain = "0|1";
    } else {
      for (std::size_t k = 0; k < a.categories.size(); ++k) {
        if (a.categories[k].find('|') != std::string::npos) {
          throw ConfigError("category '" + a.categories[k] + "' of " + a.name + " contains '|'");
        }
        if (k) domain += '|';
        domain += a.categories[k];
      }
    }
    columns += csv::format_row({a.name, std::string(to_string(a.kind)), domain, std::string(to_string(a.source))});
    if (!stored_sparse(a)) {
      object_header.push_back(a.name);
      dense.push_back(j);
    }
  }

  std::string objects = csv::format_row(object_header);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row = {data.object_id(i)};
    for (std::size_t j : dense) row.push_back(cell_text(data, j, i));
    objects += csv::format_row(row);
  }

  std::string coo = "row,feature_name,count\n";
  std::vector<std::vector<std::pair<std::size_t, double>>> by_row(data.size());
  for (std::size_t j = 0; j < data.attribute_count(); ++j) {
    if (!stored_sparse(data.attribute(j))) continue;
    std::vector<double> v = data.numbers(j);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) by_row[i].emplace_back(j, v[i]);
    }
  }
  for (std::size_t i = 0; i < by_row.size(); ++i) {
    for (auto& [j, v] : by_row[i]) coo += csv::format_row({std::to_string(i), data.attribute(j).name, format_number(v)});
  }

  write_text_file(dir + "/columns.csv", columns);
  write_text_file(dir + "/objects.csv", objects);
  write_text_file(dir + "/features.coo", coo);
}

Dataset parse_dataset(const std::string& columns_csv, const std::string& objects_csv, const std::string& features_coo) {
  csv::Table cols = csv::parse(columns_csv);
  int cn = cols.column("name"), ck = cols.column("kind"), cd = cols.column("domain"), cs = cols.column("source");
  if (cn < 0 || ck < 0 || cd < 0) throw FormatError("columns.csv needs name,kind,domain");

  std::vector<Attribute> attrs;
  std::map<std::string, std::size_t> by_name;
  for (const auto& row : cols.rows) {
    Attribute a;
    a.name = row[cn];
    auto kind = parse_attribute_kind(row[ck]);
    if (!kind) throw FormatError("columns.csv: unknown kind '" + row[ck] + "' for " + a.name);
    a.kind = *kind;
    a.source = Provenance::Meta;
    if (cs >= 0 && !row[cs].empty()) {
      auto src = parse_provenance(row[cs]);
      if (!src) throw FormatError("columns.csv: unknown source '" + row[cs] + "' for " + a.name);
      a.source = *src;
    }
    if ((a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal) && !row[cd].empty()) {
      a.categories = split(row[cd], '|');
    }
    if (!by_name.emplace(a.name, attrs.size()).second) throw FormatError("columns.csv: duplicate " + a.name);
    attrs.push_back(std::move(a));
  }

  csv::Table objs = csv::parse(objects_csv);
  if (objs.header.empty() || objs.header[0] != "object_id") throw FormatError("objects.csv must start with object_id");
  const std::size_t n = objs.rows.size();
  std::vector<std::string> ids;
  for (const auto& row : objs.rows) ids.push_back(row[0]);

  std::vector<ColumnData> data(attrs.size());
  std::vector<bool> filled(attrs.size(), false);
  for (std::size_t c = 1; c < objs.header.size(); ++c) {
    auto it = by_name.find(objs.header[c]);
    if (it == by_name.end()) throw FormatError("objects.csv column not in columns.csv: " + objs.header[c]);
    const Attribute& a = attrs[it->second];
    if (stored_sparse(a)) throw FormatError("query-token column " + a.name + " belongs in features.coo");
    if (a.kind == AttributeKind::Numeric) {
      DenseColumn col;
      for (const auto& row : objs.rows) {
        if (row[c].empty()) {
          col.values.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        auto v = parse_number(row[c]);
        if (!v) throw FormatError("objects.csv: " + a.name + " has non-number '" + row[c] + "'");
        col.values.push_back(*v);
      }
      data[it->second] = std::move(col);
    } else {
      CodeColumn col;
      for (const auto& row : objs.rows) {
        if (row[c].empty()) {
          col.codes.push_back(-1);
        } else if (a.kind == AttributeKind::Boolean) {
          if (row[c] != "0" && row[c] != "1") throw FormatError("objects.csv: " + a.name + " is not 0/1");
          col.codes.push_back(row[c] == "1" ? 1 : 0);
        } else {
          auto k = std::find(a.categories.begin(), a.categories.end(), row[c]);
          if (k == a.categories.end()) throw FormatError("objects.csv: " + a.name + " value outside domain: " + row[c]);
          col.codes.push_back(static_cast<std::int32_t>(k - a.categories.begin()));
        }
      }
      data[it->second] = std::move(col);
    }
    filled[it->second] = true;
  }

  std::vector<std::map<std::uint32_t, double>> sparse(attrs.size());
  if (!features_coo.empty()) {
    csv::Table coo = csv::parse(features_coo);
    int r = coo.column("row"), f = coo.column("feature_name"), v = coo.column("count");
    if (r < 0 || f < 0 || v < 0) throw FormatError("features.coo header must be row,feature_name,count");
    for (const auto& row : coo.rows) {
      auto it = by_name.find(row[f]);
      if (it == by_name.end() || !stored_sparse(attrs[it->second])) {
        throw FormatError("features.coo: unknown token column " + row[f]);
      }
      auto ri = parse_number(row[r]);
      auto vi = parse_number(row[v]);
      if (!ri || *ri < 0 || *ri >= static_cast<double>(n) || *ri != std::floor(*ri) || !vi) {
        throw FormatError("features.coo: bad entry for " + row[f]);
      }
      sparse[it->second][static_cast<std::uint32_t>(*ri)] = *vi;
    }
  }
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    if (stored_sparse(attrs[j])) {
      SparseColumn col;
      for (auto& [row, v] : sparse[j]) {
        if (v == 0.0) continue;
        col.rows.push_back(row);
        col.values.push_back(v);
      }
      data[j] = std::move(col);
    } else if (!filled[j]) {
      throw FormatError("objects.csv lacks column " + attrs[j].name);
    }
  }
  try {
    return Dataset(std::move(ids), std::move(attrs), std::move(data));
  } catch (const DatasetError& e) {
    throw FormatError(e.what());
  }
}

Dataset load_dataset(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a dataset directory: " + dir);
  const std::string coo_path = dir + "/features.coo";
  std::string coo = std::filesystem::exists(coo_path) ? read_text_file(coo_path) : std::string();
  return parse_dataset(read_text_file(dir + "/columns.csv"), read_text_file(dir + "/objects.csv"), coo);
}

std::string dataset_digest(const std::string& columns_csv, const std::string& objects_csv,
                           const std::string& features_coo) {
  std::string all = columns_csv;
  all += '\0';
  all += objects_csv;
  all += '\0';
  all += features_coo;
  return sha256_hex(all);
}

std::string dataset_digest(const std::string& dir) {
  const std::string coo_path = dir + "/features.coo";
  return dataset_digest(read_text_file(dir + "/columns.csv"), read_text_file(dir + "/objects.csv"),
                        std::filesystem::exists(coo_path) ? read_text_file(coo_path) : std::string());
}

}  // namespace wld
