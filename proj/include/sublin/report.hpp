#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sublin {

struct ExperimentRow {
  std::size_t n = 0;
  double value = 0;
  double prediction = 0;  // predicted limit, or the upper end of the predicted band
  double lower = 0;       // lower end of the predicted band
  double gap = 0;         // value - prediction
  std::string exact_value;  // "p/q" in exact-rational mode, empty otherwise
};

/// Rows of (n, computed value, prediction) with free-form metadata.
class ExperimentTable {
 public:
  void set(std::string key, std::string value);
  [[nodiscard]] const std::string& get(const std::string& key) const;

  /// Appends a row; n must increase strictly. The gap is recomputed.
  void add_row(ExperimentRow row);

  [[nodiscard]] const std::vector<ExperimentRow>& rows() const noexcept { return rows_; }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept {
    return metadata_;
  }

  /// `n,value,prediction,gap` with 17 significant digits.
  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] std::string to_json() const;

 private:
  std::vector<ExperimentRow> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace sublin
