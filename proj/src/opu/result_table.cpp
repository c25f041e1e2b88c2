#include "opu/result_table.hpp"

#include <cstdio>
#include <sstream>

#include "opu/errors.hpp"

namespace opu {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) fail(ErrorCode::kInvalidArgument, "result table needs at least one column");
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    fail(ErrorCode::kDimensionMismatch, "row has " + std::to_string(row.size()) + " values, table has " +
                                            std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  if (key.find_first_of(":\n") != std::string::npos || value.find('\n') != std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "metadata key/value contains a reserved character");
  }
  for (auto& [k, v] : metadata_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata_.emplace_back(key, value);
}

const std::string* ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == name) return c;
  }
  fail(ErrorCode::kInvalidArgument, "no column named '" + name + "'");
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const auto c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

std::string ResultTable::render(bool include_wall_clock) const {
  std::string out;
  for (const auto& [k, v] : metadata_) {
    if (!include_wall_clock && k == "wall_clock_seconds") continue;
    out += "# " + k + ": " + v + "\n";
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_csv() const { return render(true); }
std::string ResultTable::payload() const { return render(false); }

ResultTable ResultTable::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ResultTable t;
  std::vector<std::pair<std::string, std::string>> meta;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos || colon < 2) {
        fail(ErrorCode::kFormat, "line " + std::to_string(lineno) + ": malformed metadata");
      }
      meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      t = ResultTable(std::move(cells));
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        fail(ErrorCode::kFormat, "line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    t.add_row(std::move(row));
  }
  if (!header) fail(ErrorCode::kFormat, "table has no header row");
  for (auto& [k, v] : meta) t.set_meta(k, v);
  return t;
}

std::string ResultTable::gnuplot_script(const std::string& data_path) const {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel '" << columns_.front() << "'\n"
     << "plot";
  for (std::size_t c = 1; c < columns_.size(); ++c) {
    os << (c > 1 ? ", \\\n    " : " ") << "'" << data_path << "' using 1:" << (c + 1) << " with linespoints";
  }
  os << '\n';
  return os.str();
}

}  // namespace opu
