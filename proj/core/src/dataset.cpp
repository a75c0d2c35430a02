#include "treeaudit/dataset.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "treeaudit/errors.hpp"

namespace treeaudit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void Dataset::add(FeatureVector row, ClassId label) {
  rows.push_back(std::move(row));
  labels.push_back(label);
}

ClassId Dataset::intern_class(const std::string& name) {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == name) return static_cast<ClassId>(c);
  }
  classes.push_back(name);
  return static_cast<ClassId>(classes.size() - 1);
}

void Dataset::validate() const {
  if (rows.size() != labels.size()) throw SchemaError("dataset rows and labels differ in length");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    schema.validate(rows[r]);
    if (labels[r] >= classes.size()) throw SchemaError("row " + std::to_string(r) + " has an unknown label");
  }
}

Dataset read_dataset_csv(std::istream& in, const FeatureSchema& schema) {
  Dataset data;
  data.schema = schema;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: missing header line");
  const auto header = split_csv_line(line);
  if (header.empty() || header.back() != "label") {
    throw ParseError("dataset: header must end with a 'label' column");
  }
  if (header.size() != schema.size() + 1) {
    throw ParseError("dataset: header has " + std::to_string(header.size() - 1) +
                     " feature columns, schema expects " + std::to_string(schema.size()));
  }
  std::vector<std::size_t> column_to_feature(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    auto idx = schema.index_of(header[c]);
    if (!idx) throw ParseError("dataset: unknown feature column '" + header[c] + "'");
    column_to_feature[c] = *idx;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells");
    }
    FeatureVector row(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& cell = cells[c];
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || v < 0) {
        throw ParseError("dataset line " + std::to_string(line_no) + ", column '" + header[c] +
                         "': expected a non-negative integer, got '" + cell + "'");
      }
      row[column_to_feature[c]] = v;
    }
    if (cells.back().empty()) throw ParseError("dataset line " + std::to_string(line_no) + ": empty label");
    data.add(std::move(row), data.intern_class(cells.back()));
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (const auto& f : data.schema.features()) out << f.name << ',';
  out << "label\n";
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    for (auto v : data.rows[r]) out << v << ',';
    out << data.classes[data.labels[r]] << '\n';
  }
}

}  // namespace treeaudit
