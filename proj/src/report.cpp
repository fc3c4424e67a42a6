#include "sublin/report.hpp"

#include <fstream>
#include <json.hpp>

#include "sublin/error.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

void ExperimentTable::set(std::string key, std::string value) {
  for (auto& [k, v] : metadata_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata_.emplace_back(std::move(key), std::move(value));
}

const std::string& ExperimentTable::get(const std::string& key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  static const std::string empty;
  return empty;
}

void ExperimentTable::add_row(ExperimentRow row) {
  if (!rows_.empty() && row.n <= rows_.back().n) {
    throw Error(ErrorKind::usage, "experiment schedule must be strictly increasing");
  }
  row.gap = row.value - row.prediction;
  rows_.push_back(std::move(row));
}

std::string ExperimentTable::to_csv() const {
  std::string out = "n,value,prediction,gap\n";
  for (const auto& r : rows_) {
    out += std::to_string(r.n) + "," + format_double(r.value) + "," + format_double(r.prediction) +
           "," + format_double(r.gap) + "\n";
  }
  return out;
}

std::string ExperimentTable::to_json() const {
  nlohmann::ordered_json doc;
  auto& meta = doc["metadata"];
  meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata_) meta[k] = v;
  auto& rows = doc["rows"];
  rows = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["value"] = r.value;
    if (!r.exact_value.empty()) row["value_exact"] = r.exact_value;
    row["prediction"] = r.prediction;
    row["lower"] = r.lower;
    row["gap"] = r.gap;
    rows.push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::usage, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorKind::usage, "failed writing '" + path + "'");
}

}  // namespace sublin
