#include "treeaudit/recipe_search.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "json_util.hpp"

namespace treeaudit {

RecipeBox TargetRules::to_box(std::size_t n_features) const {
  auto box = RecipeBox::full(n_features, target);
  for (const auto& b : bounds) {
    auto& iv = box.intervals.at(b.feature);
    iv.lo = std::max(iv.lo, b.threshold);
  }
  return box;
}

namespace {

class PathSearch {
 public:
  PathSearch(const DecisionTree& tree, ClassId target, const RecipeBox& recipe, const FeatureSchema& schema,
             const SearchOptions& options)
      : tree_(tree), target_(target), box_(recipe), schema_(schema), options_(options) {}

  std::optional<AdversarialPath> run() {
    if (!visit(0)) return std::nullopt;
    return std::move(found_);
  }

 private:
  // Narrows box_[f] by `cond`; returns false and leaves box_ untouched when the
  // result would be inconsistent.
  bool constrain(const Condition& cond) {
    const Interval add = cond.at_most ? Interval::at_most(cond.threshold) : Interval::greater_than(cond.threshold);
    auto& slot = box_.intervals[cond.feature];
    auto merged = merge(slot, add);
    if (!merged) return false;
    const Interval saved = slot;
    slot = *merged;
    if (auto p = schema_.pair_of(cond.feature)) {
      const auto& pair = schema_.flow_pairs()[*p];
      const auto& pkt = box_.intervals[pair.pkt];
      const auto& byte = box_.intervals[pair.byte];
      if (!pair_frame_size_consistent(pkt, byte, schema_.frame_min(), schema_.frame_max()) ||
          !pair_boundary_consistent(pkt, byte, schema_.frame_min(), schema_.frame_max(), options_.p_cap)) {
        slot = saved;
        return false;
      }
    }
    undo_.push_back({cond.feature, saved});
    path_.push_back(cond);
    return true;
  }

  void release() {
    box_.intervals[undo_.back().first] = undo_.back().second;
    undo_.pop_back();
    path_.pop_back();
  }

  bool visit(std::int32_t i) {
    const auto& n = tree_.nodes[i];
    if (n.is_leaf()) return n.label == target_ && accept_leaf(i);
    for (bool at_most : {true, false}) {
      if (!constrain({static_cast<std::size_t>(n.feature), n.threshold, at_most})) continue;
      if (visit(at_most ? n.left : n.right)) return true;
      release();
    }
    return false;
  }

  bool accept_leaf(std::int32_t i) {
    const auto& guards = tree_.nodes[i].guards;
    std::size_t applied = 0;
    for (const auto& g : guards) {
      if (!constrain({g.feature, g.threshold, true})) break;
      ++applied;
    }
    if (applied != guards.size()) {
      for (; applied > 0; --applied) release();
      return false;
    }
    found_ = AdversarialPath{path_, i, box_};
    return true;
  }

  const DecisionTree& tree_;
  ClassId target_;
  RecipeBox box_;
  const FeatureSchema& schema_;
  const SearchOptions& options_;
  std::vector<std::pair<std::size_t, Interval>> undo_;
  std::vector<Condition> path_;
  std::optional<AdversarialPath> found_;
};

}  // namespace

std::optional<AdversarialPath> find_adv_path(const DecisionTree& tree, ClassId target, const RecipeBox& recipe,
                                             const FeatureSchema& schema, const SearchOptions& options) {
  return PathSearch(tree, target, recipe, schema, options).run();
}

FeatureVector project(const RecipeBox& recipe, const FeatureSchema& schema, std::int64_t p_cap) {
  FeatureVector x(schema.size(), 0);
  std::vector<bool> done(schema.size(), false);
  for (const auto& pair : schema.flow_pairs()) {
    auto r = smallest_equal_size(recipe.intervals[pair.pkt], recipe.intervals[pair.byte], schema.frame_min(),
                                 schema.frame_max(), 0, 0, p_cap);
    if (!r) throw InvariantViolation("project: flow '" + pair.flow + "' has no equal-size realization");
    x[pair.pkt] = r->packets;
    x[pair.byte] = r->bytes();
    done[pair.pkt] = done[pair.byte] = true;
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (done[f]) continue;
    const auto range = recipe.intervals[f].counts();
    if (range.empty()) {
      throw InvariantViolation("project: feature '" + schema.feature(f).name + "' admits no count");
    }
    x[f] = range.lo;
  }
  return x;
}

RecipeAttempt find_recipe(const VotingEnsemble& model, std::span<const std::size_t> tree_order,
                          const TargetRules& rules, double min_score, const SearchOptions& options,
                          std::optional<std::chrono::steady_clock::time_point> deadline) {
  RecipeAttempt attempt;
  RecipeBox recipe = rules.to_box(model.schema.size());
  if (!fully_consistent(recipe, model.schema, options.p_cap)) {
    attempt.candidate = std::move(recipe);
    return attempt;
  }
  for (std::size_t t : tree_order) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      attempt.timed_out = true;
      attempt.candidate = std::move(recipe);
      return attempt;
    }
    if (auto path = find_adv_path(model.trees[t], rules.target, recipe, model.schema, options)) {
      auto provenance = std::move(recipe.provenance);
      recipe = std::move(path->merged);
      recipe.provenance = std::move(provenance);
      recipe.provenance.trees.push_back(t);
      ++attempt.trees_merged;
    }
  }
  auto x = project(recipe, model.schema, options.p_cap);
  auto p = predict(model, x);
  const bool accepted = p.label == rules.target && p.score >= min_score;
  attempt.candidate = recipe;
  attempt.projected = std::move(x);
  attempt.prediction = std::move(p);
  if (accepted) attempt.recipe = std::move(recipe);
  return attempt;
}

std::vector<std::vector<std::size_t>> tree_orderings(std::size_t n_trees, const GenerateOptions& options) {
  std::vector<std::size_t> identity(n_trees);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> orders;
  if (options.all_orderings) {
    auto order = identity;
    do {
      orders.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return orders;
  }
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < options.permutations; ++i) {
    auto order = identity;
    if (i > 0) std::shuffle(order.begin(), order.end(), rng);
    orders.push_back(std::move(order));
  }
  return orders;
}

RecipeSet generate_recipes(const VotingEnsemble& model, const TargetRules& rules, double min_score,
                           const GenerateOptions& options) {
  const auto orders = tree_orderings(model.trees.size(), options);
  std::vector<RecipeAttempt> attempts(orders.size());
  auto run = [&](std::size_t i) {
    const auto deadline = std::chrono::steady_clock::now() + options.budget_per_permutation;
    attempts[i] = find_recipe(model, orders[i], rules, min_score, options.search, deadline);
    if (attempts[i].recipe) attempts[i].recipe->provenance.permutation = i;
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, orders.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < orders.size(); ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < orders.size(); i += threads) run(i);
      });
    }
  }

  RecipeSet out;
  out.permutations_run = orders.size();
  for (auto& a : attempts) {
    out.partial = out.partial || a.timed_out;
    if (!a.recipe) continue;
    ++out.accepted;
    const bool seen = std::any_of(out.recipes.begin(), out.recipes.end(),
                                  [&](const RecipeBox& r) { return r.same_region(*a.recipe); });
    if (!seen) out.recipes.push_back(std::move(*a.recipe));
  }
  return out;
}

std::string recipe_to_json_line(const RecipeRecord& record, const VotingEnsemble& model) {
  using detail::Json;
  const auto& r = record.recipe;
  Json intervals = Json::object();
  for (std::size_t f = 0; f < model.schema.size(); ++f) {
    intervals[model.schema.feature(f).name] = {{"gt", detail::bound_to_json(r.intervals[f].lo)},
                                               {"le", detail::bound_to_json(r.intervals[f].hi)}};
  }
  Json line{{"target_class", model.classes.at(r.target)},
            {"attack", record.attack},
            {"impact", record.impact},
            {"intervals", intervals},
            {"provenance", {{"permutation", r.provenance.permutation}, {"trees", r.provenance.trees}}}};
  return line.dump();
}

std::vector<RecipeRecord> parse_recipes_jsonl(std::string_view text, const VotingEnsemble& model) {
  using detail::Json;
  std::vector<RecipeRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "recipes line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    RecipeRecord rec;
    const auto cls = detail::require_string(j, "target_class", where);
    try {
      rec.recipe = RecipeBox::full(model.schema.size(), model.class_id(cls));
    } catch (const SchemaError& e) {
      throw ParseError(where + ": " + e.what());
    }
    rec.attack = j.value("attack", std::string());
    rec.impact = j.value("impact", std::int64_t{0});
    const auto& intervals = detail::require(j, "intervals", where);
    if (!intervals.is_object()) throw ParseError(where + ".intervals: expected an object");
    for (const auto& [name, iv] : intervals.items()) {
      auto f = model.schema.index_of(name);
      if (!f) throw ParseError(where + ".intervals: unknown feature '" + name + "'");
      const std::string fp = where + ".intervals." + name;
      rec.recipe.intervals[*f] = {detail::bound_from_json(detail::require(iv, "gt", fp), -kInf, fp + ".gt"),
                                  detail::bound_from_json(detail::require(iv, "le", fp), kInf, fp + ".le")};
    }
    if (auto p = j.find("provenance"); p != j.end() && p->is_object()) {
      rec.recipe.provenance.permutation = p->value("permutation", std::size_t{0});
      if (auto t = p->find("trees"); t != p->end() && t->is_array()) {
        rec.recipe.provenance.trees = t->get<std::vector<std::size_t>>();
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace treeaudit
