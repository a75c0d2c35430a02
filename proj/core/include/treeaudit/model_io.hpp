#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "treeaudit/model.hpp"

namespace treeaudit {

struct ModelDocument {
  VotingEnsemble model;
  std::optional<ClassThresholds> thresholds;
};

// Single JSON document: schema, classes, nested trees, weights, thresholds.
// Class thresholds are written as shortest round-trip decimal strings. Models
// carrying guards list the ANOMALOUS sentinel after the real classes.
std::string save_model(const VotingEnsemble& model, const std::optional<ClassThresholds>& thresholds);

// Throws ParseError naming the offending node path, e.g.
// "trees[1].right.left: missing field 'threshold'".
ModelDocument load_model(std::string_view document);

ModelDocument load_model_file(const std::string& path);
void save_model_file(const std::string& path, const VotingEnsemble& model,
                     const std::optional<ClassThresholds>& thresholds);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace treeaudit
