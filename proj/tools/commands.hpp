#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeaudit/online.hpp"

namespace treeaudit::cli {

// Default output directory when --out-dir is not given.
inline constexpr const char* kOutDirEnv = "TREEAUDIT_OUT_DIR";
inline constexpr const char* kFallbackOutDir = "treeaudit-out";

std::string resolve_out_dir(const std::optional<std::string>& flag);

struct GenerateConfig {
  std::string out_dir;
  std::size_t epochs_per_class = 400;
  std::uint64_t seed = 1;
};

struct TrainConfig {
  std::string dataset;
  std::string out_dir;
  std::size_t trees = 100;
  std::size_t max_depth = 12;
  std::size_t min_leaf = 1;
  std::uint64_t seed = 1;
};

struct AuditConfig {
  std::string model;
  std::string out_dir;
  std::string attack = "syn";
  std::vector<std::int64_t> impacts;
  // Empty means every class of the model.
  std::vector<std::string> classes;
  // One audit row per entry; recipes.jsonl holds the largest run.
  std::vector<std::size_t> permutations{20};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::int64_t budget_ms = 60'000;
  // Adds a wall_ms column; the output is then no longer reproducible.
  bool timing = false;
};

struct SimulateConfig {
  std::string model;
  // Recipes to draw from; when empty they are generated with `permutations`.
  std::string recipes;
  std::string out_dir;
  std::string device_class;
  std::string attack = "syn";
  std::int64_t impact = 300;
  std::vector<std::int64_t> shifts{0};
  // benign, adversarial, non-adversarial epochs.
  std::size_t benign_epochs = 8;
  std::size_t adversarial_epochs = 22;
  std::size_t non_adversarial_epochs = 5;
  std::size_t permutations = 20;
  ByteRealization realization = ByteRealization::kEqualSize;
  std::string label = "model";
  std::uint64_t seed = 0;
};

struct PatchConfig {
  std::string model;
  std::string dataset;
  std::string out_dir;
  bool essential = true;
  std::vector<std::string> additional;
  bool leaf_maxima = false;
  // Re-audit grid; skipped when impacts is empty.
  std::string attack = "ssdp";
  std::vector<std::int64_t> impacts;
  std::size_t permutations = 20;
  std::uint64_t seed = 1;
};

struct ReportConfig {
  std::vector<std::string> audits;
  std::vector<std::string> episodes;
  std::string out_dir;
};

// Each command writes its files into the output directory and returns the
// process exit code. Errors propagate as treeaudit::Error.
int cmd_generate(const GenerateConfig& config);
int cmd_train(const TrainConfig& config);
int cmd_audit(const AuditConfig& config);
int cmd_simulate(const SimulateConfig& config);
int cmd_patch(const PatchConfig& config);
int cmd_report(const ReportConfig& config);

// Parses argv, runs the subcommand and maps exceptions to exit codes.
int run(int argc, char** argv);

}  // namespace treeaudit::cli
