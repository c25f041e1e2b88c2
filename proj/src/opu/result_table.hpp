#pragma once

#include <string>
#include <utility>
#include <vector>

namespace opu {

// CSV table with a '#'-prefixed "key: value" metadata header.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns);

  void add_row(std::vector<double> row);
  void set_meta(const std::string& key, const std::string& value);
  const std::string* meta(const std::string& key) const;

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return metadata_; }
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  std::string to_csv() const;
  // Everything except the wall_clock_seconds metadata line.
  std::string payload() const;
  static ResultTable parse_csv(const std::string& text);

  // gnuplot script plotting every column against the first.
  std::string gnuplot_script(const std::string& data_path) const;

 private:
  std::string render(bool include_wall_clock) const;

  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

std::string format_number(double v);

}  // namespace opu
