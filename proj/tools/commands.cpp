#include "commands.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <system_error>

#include "treeaudit/attacks.hpp"
#include "treeaudit/dataset.hpp"
#include "treeaudit/errors.hpp"
#include "treeaudit/files.hpp"
#include "treeaudit/model_io.hpp"
#include "treeaudit/patching.hpp"
#include "treeaudit/recipe_search.hpp"
#include "treeaudit/training.hpp"
#include "treeaudit/traffic.hpp"

namespace treeaudit::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Collects a command's files and publishes them together. A fresh directory
// appears in one rename; an existing one gets each file replaced atomically.
class OutputDir {
 public:
  explicit OutputDir(std::string path) : path_(std::move(path)) {}

  void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

  void commit() const {
    std::error_code ec;
    if (fs::exists(path_, ec)) {
      if (!fs::is_directory(path_, ec)) throw IoError("'" + path_ + "' exists and is not a directory");
      for (const auto& [name, contents] : files_) write_file_atomic((fs::path(path_) / name).string(), contents);
      return;
    }
    const fs::path target = fs::absolute(path_);
    const fs::path staging = target.string() + ".staging-" + std::to_string(::getpid());
    fs::create_directories(target.parent_path(), ec);
    fs::remove_all(staging, ec);
    if (!fs::create_directory(staging, ec) || ec) {
      throw IoError("cannot create '" + staging.string() + "': " + ec.message());
    }
    for (const auto& [name, contents] : files_) write_file_atomic((staging / name).string(), contents);
    fs::rename(staging, target, ec);
    if (ec) {
      fs::remove_all(staging);
      throw IoError("cannot create '" + path_ + "': " + ec.message());
    }
  }

 private:
  std::string path_;
  std::vector<std::pair<std::string, std::string>> files_;
};

ModelDocument load_with_thresholds(const std::string& path) {
  auto doc = load_model_file(path);
  if (!doc.thresholds) throw ThresholdError("model '" + path + "' carries no class thresholds");
  return doc;
}

std::vector<ClassId> select_classes(const VotingEnsemble& model, const std::vector<std::string>& names) {
  std::vector<ClassId> out;
  if (names.empty()) {
    for (std::size_t c = 0; c < model.classes.size(); ++c) out.push_back(static_cast<ClassId>(c));
  } else {
    for (const auto& n : names) out.push_back(model.class_id(n));
  }
  return out;
}

std::string bool_str(bool b) { return b ? "1" : "0"; }

Json counts_json(const FeatureSchema& schema, FeatureView x, bool skip_zero) {
  Json j = Json::object();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (skip_zero && x[f] == 0) continue;
    j[schema.feature(f).name] = x[f];
  }
  return j;
}

Json plan_json(const SimulateConfig& cfg, const VotingEnsemble& model, std::int64_t shift, const WindowPlan& w,
               const std::vector<RecipeBox>& recipes) {
  const auto& schema = model.schema;
  Json j{{"run", cfg.label}, {"class", cfg.device_class}, {"shift", shift}, {"window", w.window}};
  j["observed"] = counts_json(schema, w.observed, false);
  if (!w.recipe) {
    j["feasible"] = false;
    return j;
  }
  j["feasible"] = true;
  j["recipe"] = *w.recipe;
  j["recipe_permutation"] = recipes[*w.recipe].provenance.permutation;
  j["target"] = counts_json(schema, *w.target_instance, false);
  j["overhead"] = counts_json(schema, w.injection->overhead, true);
  Json flows = Json::array();
  for (const auto& f : w.injection->flows) {
    const auto& name = schema.flow_pairs()[f.pair].flow;
    Json fj{{"flow", name}, {"packets", f.packets}, {"bytes", f.bytes}, {"frame_size", f.frame_size}};
    if (auto s = spoof_fields(name)) {
      fj["spoof"] = {{"src_mac", s->src_mac}, {"dst_mac", s->dst_mac}, {"src_ip", s->src_ip},
                     {"dst_ip", s->dst_ip},   {"src_port", s->src_port}, {"dst_port", s->dst_port}};
    }
    flows.push_back(std::move(fj));
  }
  j["flows"] = std::move(flows);
  j["corrective_icmp"] = w.injection->corrective_icmp;
  j["attack_packets"] = w.attack_packets_sent;
  j["overhead_packets"] = w.overhead_packets_sent;
  return j;
}

// Minimal reader for the comma-separated files this tool writes.
struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(const std::string& path) {
  Table t{path, {}, {}};
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ParseError(path + ": empty file");
  return t;
}

std::int64_t to_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(where + ": expected an integer, got '" + s + "'");
}

std::string ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? std::string("") : format_double(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

std::string resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kFallbackOutDir;
}

int cmd_generate(const GenerateConfig& config) {
  const auto traffic = BenignTraceModel::iot_default();
  const auto data = generate_dataset(traffic, config.epochs_per_class, config.seed);
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  OutputDir out(config.out_dir);
  out.add("dataset.csv", csv.str());
  out.commit();
  std::cout << "wrote " << data.size() << " rows over " << data.classes.size() << " classes to "
            << (fs::path(config.out_dir) / "dataset.csv").string() << "\n";
  return 0;
}

int cmd_train(const TrainConfig& config) {
  std::istringstream in(read_file(config.dataset));
  const auto data = read_dataset_csv(in, FeatureSchema::iot_default());
  ForestParams params;
  params.n_trees = config.trees;
  params.max_depth = config.max_depth;
  params.min_leaf = config.min_leaf;
  params.seed = config.seed;
  const auto model = train_random_forest(data, params);
  const auto thresholds = compute_thresholds(model, data);
  OutputDir out(config.out_dir);
  out.add("model.json", save_model(model, thresholds));
  out.commit();
  std::cout << "trained " << model.trees.size() << " trees on " << data.size()
            << " rows, training accuracy " << format_double(accuracy(model, data)) << "\n";
  return 0;
}

int cmd_audit(const AuditConfig& config) {
  const auto doc = load_with_thresholds(config.model);
  const auto& model = doc.model;
  if (config.impacts.empty()) throw SchemaError("audit needs at least one impact");
  if (config.permutations.empty()) throw SchemaError("audit needs at least one permutation count");
  const auto largest = *std::max_element(config.permutations.begin(), config.permutations.end());

  std::string csv = "class,attack,impact,permutations,seed,recipes,accepted,partial";
  csv += config.timing ? ",wall_ms\n" : "\n";
  std::string jsonl;
  std::size_t total = 0;
  for (ClassId c : select_classes(model, config.classes)) {
    for (auto impact : config.impacts) {
      const auto profile = resolve_attack(config.attack, model.schema, impact);
      const auto rules = build_target_rules(profile, model.schema, c);
      bool written = false;
      for (auto perms : config.permutations) {
        GenerateOptions options;
        options.permutations = perms;
        options.seed = config.seed;
        options.threads = config.threads;
        options.budget_per_permutation = std::chrono::milliseconds(config.budget_ms);
        const auto start = std::chrono::steady_clock::now();
        const auto set = generate_recipes(model, rules, doc.thresholds->at(c).t, options);
        const auto wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
        csv += model.classes[c] + ',' + profile.name + ',' + std::to_string(impact) + ',' + std::to_string(perms) +
               ',' + std::to_string(config.seed) + ',' + std::to_string(set.recipes.size()) + ',' +
               std::to_string(set.accepted) + ',' + bool_str(set.partial);
        csv += config.timing ? ',' + std::to_string(static_cast<std::int64_t>(wall.count())) + '\n' : "\n";
        if (perms == largest && !written) {
          written = true;
          total += set.recipes.size();
          for (const auto& r : set.recipes) jsonl += recipe_to_json_line({r, profile.name, impact}, model) + '\n';
        }
      }
    }
  }
  OutputDir out(config.out_dir);
  out.add("recipes.jsonl", jsonl);
  out.add("audit.csv", csv);
  out.commit();
  std::cout << total << " unique recipes written to " << (fs::path(config.out_dir) / "recipes.jsonl").string()
            << "\n";
  return 0;
}

int cmd_simulate(const SimulateConfig& config) {
  const auto doc = load_with_thresholds(config.model);
  const auto& model = doc.model;
  const ClassId target = model.class_id(config.device_class);
  const auto profile = resolve_attack(config.attack, model.schema, config.impact);

  std::vector<RecipeBox> recipes;
  if (!config.recipes.empty()) {
    for (auto& rec : parse_recipes_jsonl(read_file(config.recipes), model)) {
      if (rec.recipe.target == target && rec.attack == profile.name && rec.impact == config.impact) {
        recipes.push_back(std::move(rec.recipe));
      }
    }
  } else {
    GenerateOptions options;
    options.permutations = config.permutations;
    options.seed = config.seed;
    recipes = generate_recipes(model, build_target_rules(profile, model.schema, target),
                               doc.thresholds->at(target).t, options)
                  .recipes;
  }

  const auto traffic = BenignTraceModel::iot_default();
  const std::size_t n = config.benign_epochs + config.adversarial_epochs + config.non_adversarial_epochs;
  const auto trace = generate_benign_trace(traffic, config.device_class, n, config.seed);
  InjectionOptions options;
  options.realization = config.realization;
  options.injection_supported = traffic.find(config.device_class).injection_supported;
  EpisodeTiming timing;
  timing.schedule =
      staged_schedule(config.benign_epochs, config.adversarial_epochs, config.non_adversarial_epochs);

  std::string csv =
      "run,class,attack,impact,shift,epoch,mode,predicted,score,threshold,detected,attack_pkts,overhead_pkts,"
      "feasible\n";
  std::string jsonl;
  for (auto shift : config.shifts) {
    timing.shift_seconds = shift;
    const auto result = run_episode(model, *doc.thresholds, recipes, trace, profile, timing,
                                    config.seed + static_cast<std::uint64_t>(shift), options);
    std::int64_t adv = 0, feasible = 0, bypassed = 0;
    for (const auto& o : result.outcomes) {
      csv += config.label + ',' + config.device_class + ',' + profile.name + ',' + std::to_string(config.impact) +
             ',' + std::to_string(shift) + ',' + std::to_string(o.epoch) + ',' + std::string(to_string(o.mode)) +
             ',' + model.classes[o.predicted] + ',' + format_double(o.score) + ',' + format_double(o.threshold) +
             ',' + bool_str(o.detected) + ',' + std::to_string(o.attack_packets) + ',' +
             std::to_string(o.overhead_packets) + ',' + bool_str(o.feasible) + '\n';
      if (o.mode == EpochMode::kAdversarial) {
        ++adv;
        if (o.feasible) {
          ++feasible;
          if (!o.detected) ++bypassed;
        }
      }
    }
    for (const auto& w : result.windows) {
      if (w.mode == EpochMode::kAdversarial) jsonl += plan_json(config, model, shift, w, recipes).dump() + '\n';
    }
    std::cout << "shift " << shift << ": " << bypassed << "/" << feasible << " feasible adversarial epochs bypassed ("
              << adv << " scheduled), overhead/attack packets " << result.overhead_packets_sent() << "/"
              << result.attack_packets_sent() << "\n";
  }
  OutputDir out(config.out_dir);
  out.add("episodes.csv", csv);
  out.add("plans.jsonl", jsonl);
  out.commit();
  return 0;
}

int cmd_patch(const PatchConfig& config) {
  const auto doc = load_model_file(config.model);
  const auto& model = doc.model;
  std::istringstream in(read_file(config.dataset));
  const auto data = read_dataset_csv(in, model.schema);
  const auto maxima = compute_class_maxima(data);
  std::optional<LeafMaxima> leaf_maxima;
  PatchOptions options;
  if (config.leaf_maxima) {
    leaf_maxima = compute_leaf_maxima(model, data);
    options.leaf_maxima = &*leaf_maxima;
  }

  PatchResult result{model, {}};
  if (config.essential) result = essential_patch(model, maxima, options);
  if (!config.additional.empty()) {
    std::vector<std::size_t> features;
    for (const auto& name : config.additional) features.push_back(model.schema.require_index(name));
    auto more = additional_patch(result.model, maxima, features, options);
    result.model = std::move(more.model);
    result.records.insert(result.records.end(), more.records.begin(), more.records.end());
  }

  OutputDir out(config.out_dir);
  out.add("patched_model.json", save_model(result.model, doc.thresholds));
  out.add("patch_report.csv", patch_report_csv(result.records, model));
  if (!config.impacts.empty()) {
    if (!doc.thresholds) throw ThresholdError("re-audit needs class thresholds in '" + config.model + "'");
    std::string csv = "class,attack,impact,permutations,seed,unpatched,patched\n";
    for (ClassId c = 0; c < model.classes.size(); ++c) {
      for (auto impact : config.impacts) {
        const auto profile = resolve_attack(config.attack, model.schema, impact);
        const auto rules = build_target_rules(profile, model.schema, c);
        GenerateOptions go;
        go.permutations = config.permutations;
        go.seed = config.seed;
        const double t = doc.thresholds->at(c).t;
        const auto before = generate_recipes(model, rules, t, go).recipes.size();
        const auto after = audit_patched(result.model, rules, t, go).recipes.size();
        csv += model.classes[c] + ',' + profile.name + ',' + std::to_string(impact) + ',' +
               std::to_string(config.permutations) + ',' + std::to_string(config.seed) + ',' +
               std::to_string(before) + ',' + std::to_string(after) + '\n';
      }
    }
    out.add("reaudit.csv", csv);
  }
  out.commit();
  std::cout << result.records.size() << " guards added\n";
  return 0;
}

int cmd_report(const ReportConfig& config) {
  if (config.audits.empty() && config.episodes.empty()) throw SchemaError("report needs audit or episode files");

  // (attack, impact, permutations) -> per-class unique counts.
  std::map<std::tuple<std::string, std::int64_t, std::int64_t>, std::vector<std::int64_t>> perm;
  for (const auto& path : config.audits) {
    const auto t = read_table(path);
    const auto ca = t.column("attack"), ci = t.column("impact"), cp = t.column("permutations"),
               cr = t.column("recipes");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      const auto where = path + " row " + std::to_string(i + 1);
      perm[{r[ca], to_int(r[ci], where), to_int(r[cp], where)}].push_back(to_int(r[cr], where));
    }
  }
  std::string perm_csv = "attack,impact,permutations,classes,min,max,avg\n";
  for (const auto& [key, counts] : perm) {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    std::int64_t sum = 0;
    for (auto c : counts) sum += c;
    perm_csv += std::get<0>(key) + ',' + std::to_string(std::get<1>(key)) + ',' + std::to_string(std::get<2>(key)) +
                ',' + std::to_string(counts.size()) + ',' + std::to_string(*lo) + ',' + std::to_string(*hi) + ',' +
                ratio(sum, static_cast<std::int64_t>(counts.size())) + '\n';
  }

  struct Tally {
    std::int64_t epochs = 0, detected = 0, feasible = 0, bypassed = 0;
  };
  // (run, class, attack, impact, mode) and (run, class, attack, impact, shift).
  std::map<std::tuple<std::string, std::string, std::string, std::int64_t, std::string>, Tally> by_mode;
  std::map<std::tuple<std::string, std::string, std::string, std::int64_t, std::int64_t>, Tally> by_shift;
  for (const auto& path : config.episodes) {
    const auto t = read_table(path);
    const auto crun = t.column("run"), ccls = t.column("class"), ca = t.column("attack"), ci = t.column("impact"),
               cs = t.column("shift"), cm = t.column("mode"), cd = t.column("detected"), cf = t.column("feasible");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      const auto where = path + " row " + std::to_string(i + 1);
      const auto impact = to_int(r[ci], where);
      const bool detected = to_int(r[cd], where) != 0;
      const bool feasible = to_int(r[cf], where) != 0;
      auto& m = by_mode[{r[crun], r[ccls], r[ca], impact, r[cm]}];
      ++m.epochs;
      m.detected += detected;
      if (r[cm] == to_string(EpochMode::kAdversarial)) {
        auto& s = by_shift[{r[crun], r[ccls], r[ca], impact, to_int(r[cs], where)}];
        ++s.epochs;
        if (feasible) {
          ++s.feasible;
          s.bypassed += !detected;
        }
      }
    }
  }
  std::string det_csv = "run,class,attack,impact,mode,epochs,detected,detection_rate\n";
  for (const auto& [k, v] : by_mode) {
    det_csv += std::get<0>(k) + ',' + std::get<1>(k) + ',' + std::get<2>(k) + ',' + std::to_string(std::get<3>(k)) +
               ',' + std::get<4>(k) + ',' + std::to_string(v.epochs) + ',' + std::to_string(v.detected) + ',' +
               ratio(v.detected, v.epochs) + '\n';
  }
  std::string shift_csv = "run,class,attack,impact,shift,attack_epochs,feasible_epochs,bypassed,success_rate\n";
  for (const auto& [k, v] : by_shift) {
    shift_csv += std::get<0>(k) + ',' + std::get<1>(k) + ',' + std::get<2>(k) + ',' +
                 std::to_string(std::get<3>(k)) + ',' + std::to_string(std::get<4>(k)) + ',' +
                 std::to_string(v.epochs) + ',' + std::to_string(v.feasible) + ',' + std::to_string(v.bypassed) +
                 ',' + ratio(v.bypassed, v.feasible) + '\n';
  }

  OutputDir out(config.out_dir);
  out.add("recipe_permutations.csv", perm_csv);
  out.add("detection_rate.csv", det_csv);
  out.add("time_shift.csv", shift_csv);
  out.commit();
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Adversarial recipe audit, attack simulation and patching for voting tree ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "treeaudit 0.1.0");
  std::optional<std::string> out_flag;
  const std::string out_help = std::string("Output directory (default: $") + kOutDirEnv + " or " + kFallbackOutDir + ")";

  GenerateConfig gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic labelled dataset (dataset.csv)");
  g->add_option("--epochs-per-class", gen.epochs_per_class, "Windows per device class")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("-o,--out-dir", out_flag, out_help);

  TrainConfig tr;
  auto* t = app.add_subcommand("train", "Train a random forest and its class thresholds (model.json)");
  t->add_option("--dataset", tr.dataset, "Labelled CSV")->required();
  t->add_option("--trees", tr.trees, "Number of trees")->capture_default_str();
  t->add_option("--max-depth", tr.max_depth, "Maximum tree depth")->capture_default_str();
  t->add_option("--min-leaf", tr.min_leaf, "Minimum rows per leaf")->capture_default_str();
  t->add_option("--seed", tr.seed, "Training seed")->capture_default_str();
  t->add_option("-o,--out-dir", out_flag, out_help);

  AuditConfig au;
  auto* a = app.add_subcommand("audit", "Generate adversarial recipes (recipes.jsonl, audit.csv)");
  a->add_option("--model", au.model, "Model document")->required();
  a->add_option("--attack", au.attack, "syn, ssdp or custom:<profile.json>")->capture_default_str();
  a->add_option("--impacts", au.impacts, "Attack packets per window, comma separated")->delimiter(',')->required();
  a->add_option("--classes", au.classes, "Target classes (default: all)")->delimiter(',');
  a->add_option("--permutations", au.permutations, "Tree orderings per run, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  a->add_option("--seed", au.seed, "Permutation seed")->required();
  a->add_option("--threads", au.threads, "Worker threads")->capture_default_str();
  a->add_option("--budget-ms", au.budget_ms, "Time budget per permutation")->capture_default_str();
  a->add_flag("--timing", au.timing, "Add a wall_ms column (output no longer reproducible)");
  a->add_option("-o,--out-dir", out_flag, out_help);

  SimulateConfig si;
  std::string realization = "equal";
  auto* s = app.add_subcommand("simulate", "Replay an attack episode (episodes.csv, plans.jsonl)");
  s->add_option("--model", si.model, "Model document")->required();
  s->add_option("--recipes", si.recipes, "recipes.jsonl from audit (default: generate)");
  s->add_option("--class", si.device_class, "Victim device class")->required();
  s->add_option("--attack", si.attack, "syn, ssdp or custom:<profile.json>")->capture_default_str();
  s->add_option("--impact", si.impact, "Attack packets per window")->capture_default_str();
  s->add_option("--shifts", si.shifts, "Attacker window offsets in seconds, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  s->add_option("--benign", si.benign_epochs, "Benign epochs")->capture_default_str();
  s->add_option("--adversarial", si.adversarial_epochs, "Adversarial epochs")->capture_default_str();
  s->add_option("--non-adversarial", si.non_adversarial_epochs, "Plain attack epochs")->capture_default_str();
  s->add_option("--permutations", si.permutations, "Orderings when generating recipes")->capture_default_str();
  s->add_option("--realization", realization, "Overhead frame sizes: equal or mixed")
      ->check(CLI::IsMember({"equal", "mixed"}))
      ->capture_default_str();
  s->add_option("--label", si.label, "Value of the run column")->capture_default_str();
  s->add_option("--seed", si.seed, "Trace and timing seed")->required();
  s->add_option("-o,--out-dir", out_flag, out_help);

  PatchConfig pa;
  bool no_essential = false;
  auto* p = app.add_subcommand("patch", "Add leaf guards and re-audit (patched_model.json, patch_report.csv)");
  p->add_option("--model", pa.model, "Model document")->required();
  p->add_option("--dataset", pa.dataset, "Training CSV the maxima come from")->required();
  p->add_flag("--no-essential", no_essential, "Skip essential patching");
  p->add_option("--additional", pa.additional, "Features to guard on every leaf")->delimiter(',');
  p->add_flag("--leaf-maxima", pa.leaf_maxima, "Bound guards by rows reaching the leaf instead of its class");
  p->add_option("--attack", pa.attack, "Re-audit attack")->capture_default_str();
  p->add_option("--impacts", pa.impacts, "Re-audit impacts (none: skip re-audit)")->delimiter(',');
  p->add_option("--permutations", pa.permutations, "Re-audit orderings")->capture_default_str();
  p->add_option("--seed", pa.seed, "Re-audit seed")->capture_default_str();
  p->add_option("-o,--out-dir", out_flag, out_help);

  ReportConfig re;
  auto* r = app.add_subcommand("report", "Summarise audits and episodes into CSV tables");
  r->add_option("--audit", re.audits, "audit.csv files")->delimiter(',');
  r->add_option("--episodes", re.episodes, "episodes.csv files")->delimiter(',');
  r->add_option("-o,--out-dir", out_flag, out_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    const auto out = resolve_out_dir(out_flag);
    gen.out_dir = tr.out_dir = au.out_dir = si.out_dir = pa.out_dir = re.out_dir = out;
    if (g->parsed()) return cmd_generate(gen);
    if (t->parsed()) return cmd_train(tr);
    if (a->parsed()) return cmd_audit(au);
    if (s->parsed()) {
      si.realization = realization == "mixed" ? ByteRealization::kMixedSize : ByteRealization::kEqualSize;
      return cmd_simulate(si);
    }
    if (p->parsed()) {
      pa.essential = !no_essential;
      return cmd_patch(pa);
    }
    return cmd_report(re);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInternal);
  }
}

}  // namespace treeaudit::cli
