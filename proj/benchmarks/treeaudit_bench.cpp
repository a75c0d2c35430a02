#include <benchmark/benchmark.h>

#include <random>

#include "treeaudit/attacks.hpp"
#include "treeaudit/intervals.hpp"
#include "treeaudit/model.hpp"
#include "treeaudit/online.hpp"
#include "treeaudit/recipe_search.hpp"
#include "treeaudit/training.hpp"
#include "treeaudit/traffic.hpp"

namespace ta = treeaudit;

namespace {

struct World {
  ta::Dataset data;
  ta::VotingEnsemble model;
  ta::ClassThresholds thresholds;
};

const World& world() {
  static const World w = [] {
    World w;
    w.data = ta::generate_dataset(ta::BenignTraceModel::iot_default(), 200, 7);
    ta::ForestParams p;
    p.seed = 3;
    w.model = ta::train_random_forest(w.data, p);
    w.thresholds = ta::compute_thresholds(w.model, w.data);
    return w;
  }();
  return w;
}

void BM_Predict(benchmark::State& state) {
  const auto& w = world();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ta::predict(w.model, w.data.rows[i++ % w.data.size()]));
  }
}
BENCHMARK(BM_Predict);

void BM_BoundaryCheck(benchmark::State& state) {
  const auto schema = ta::FeatureSchema::iot_default();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 2000);
  std::vector<ta::RecipeBox> boxes;
  for (int k = 0; k < 256; ++k) {
    ta::RecipeBox b{std::vector<ta::Interval>(schema.size(), ta::Interval::full()), 0, {}};
    for (auto& iv : b.intervals) {
      const double lo = v(rng);
      iv = ta::Interval{lo, lo + v(rng)};
    }
    boxes.push_back(std::move(b));
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ta::boundary_consistent(boxes[i++ % boxes.size()], schema));
}
BENCHMARK(BM_BoundaryCheck);

void BM_FindRecipe(benchmark::State& state) {
  const auto& w = world();
  const ta::ClassId c = w.model.class_id("motion_sensor");
  const auto rules = ta::build_target_rules(ta::syn_reflection(100), w.model.schema, c);
  ta::GenerateOptions o;
  o.permutations = 64;
  const auto orders = ta::tree_orderings(w.model.trees.size(), o);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ta::find_recipe(w.model, orders[i++ % orders.size()], rules, w.thresholds.at(c).t));
  }
}
BENCHMARK(BM_FindRecipe);

void BM_GenerateRecipes(benchmark::State& state) {
  const auto& w = world();
  const ta::ClassId c = w.model.class_id("motion_sensor");
  const auto rules = ta::build_target_rules(ta::ssdp_reflection(100), w.model.schema, c);
  ta::GenerateOptions o;
  o.permutations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ta::generate_recipes(w.model, rules, w.thresholds.at(c).t, o));
}
BENCHMARK(BM_GenerateRecipes)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_PlanInjection(benchmark::State& state) {
  const auto& w = world();
  const auto schema = w.model.schema;
  const auto trace = ta::generate_benign_trace(ta::BenignTraceModel::iot_default(), "motion_sensor", 16, 5);
  ta::RecipeBox box{std::vector<ta::Interval>(schema.size(), ta::Interval::full()), 0, {}};
  for (const auto& pair : schema.flow_pairs()) {
    box.intervals[pair.pkt] = ta::Interval{40, 400};
    box.intervals[pair.byte] = ta::Interval{9000, 60000};
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ta::plan_injection(box, trace[i++ % trace.size()].counts, schema));
  }
}
BENCHMARK(BM_PlanInjection);

}  // namespace

BENCHMARK_MAIN();
