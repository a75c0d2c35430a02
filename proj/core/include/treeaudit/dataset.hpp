#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treeaudit/model.hpp"
#include "treeaudit/schema.hpp"

namespace treeaudit {

// Labelled counter vectors. Labels index into `classes`.
struct Dataset {
  FeatureSchema schema;
  std::vector<std::string> classes;
  std::vector<FeatureVector> rows;
  std::vector<ClassId> labels;

  std::size_t size() const noexcept { return rows.size(); }
  void add(FeatureVector row, ClassId label);
  // Adds the class if new, returns its id.
  ClassId intern_class(const std::string& name);
  void validate() const;
};

// Header = schema feature names (any order) followed by `label`. Classes are
// numbered in order of first appearance. Throws ParseError with the line.
Dataset read_dataset_csv(std::istream& in, const FeatureSchema& schema);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace treeaudit
