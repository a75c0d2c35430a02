#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "treeaudit/dataset.hpp"
#include "treeaudit/errors.hpp"
#include "treeaudit/files.hpp"
#include "treeaudit/model_io.hpp"
#include "treeaudit/training.hpp"

namespace treeaudit {
namespace {

using testing::fixture;
using testing::plain_schema;

VotingEnsemble two_tree() { return load_model_file(fixture("two_tree_model.json")).model; }

VotingEnsemble single_leaf(ClassId label) {
  return VotingEnsemble{plain_schema(), {"A", "B"}, {DecisionTree::leaf(label)}, {}};
}

TEST(Predict, TwoTreeBothTreesVoteA) {
  const auto m = two_tree();
  const FeatureVector x{2000, 55, 20};
  const auto p = predict(m, x);
  EXPECT_EQ(m.classes[p.label], "A");
  EXPECT_DOUBLE_EQ(p.score, 1.0);
}

TEST(Predict, LeafOnlyTree) {
  const auto m = single_leaf(0);
  for (std::int64_t v : {0, 7, 100000}) {
    const auto p = predict(m, FeatureVector{v, v, v});
    EXPECT_EQ(p.label, 0u);
    EXPECT_DOUBLE_EQ(p.score, 1.0);
  }
}

TEST(Predict, TwoOfThreeVotes) {
  VotingEnsemble m{plain_schema(), {"A", "B"}, {DecisionTree::leaf(0), DecisionTree::leaf(0), DecisionTree::leaf(1)},
                   {}};
  const auto p = predict(m, FeatureVector{1, 2, 3});
  EXPECT_EQ(p.label, 0u);
  EXPECT_DOUBLE_EQ(p.score, 2.0 / 3.0);
}

TEST(Predict, TieGoesToLowestClass) {
  VotingEnsemble m{plain_schema(), {"A", "B"}, {DecisionTree::leaf(1), DecisionTree::leaf(0)}, {}};
  const auto p = predict(m, FeatureVector{0, 0, 0});
  EXPECT_EQ(p.label, 0u);
  EXPECT_DOUBLE_EQ(p.score, 0.5);
}

TEST(Predict, WeightsShiftTheVote) {
  VotingEnsemble m{plain_schema(), {"A", "B"}, {DecisionTree::leaf(0), DecisionTree::leaf(1)}, {1.0, 3.0}};
  const auto p = predict(m, FeatureVector{0, 0, 0});
  EXPECT_EQ(p.label, 1u);
  EXPECT_DOUBLE_EQ(p.score, 0.75);
}

TEST(Predict, DimensionMismatchIsSchemaError) {
  const auto m = two_tree();
  EXPECT_THROW(predict(m, FeatureVector{1, 2}), SchemaError);
  EXPECT_THROW(predict(m, FeatureVector{1, -2, 3}), SchemaError);
}

TEST(TreePredict, TwoTreeRootSendsSmallF1Left) {
  const auto m = two_tree();
  const auto& t = m.trees[0];
  EXPECT_EQ(reach_leaf(t, FeatureVector{50, 0, 0}), reach_leaf(t, FeatureVector{50, 1000, 0}));
  EXPECT_NE(reach_leaf(t, FeatureVector{50, 0, 0}), reach_leaf(t, FeatureVector{101, 0, 0}));
  // f1 <= 100 then f3 <= 5 is the A leaf on the left side.
  EXPECT_EQ(m.classes[tree_predict(t, FeatureVector{50, 0, 5})], "A");
  EXPECT_EQ(m.classes[tree_predict(t, FeatureVector{100, 0, 6})], "B");
}

TEST(TreePredict, DepthTwoReachesFourLeaves) {
  const auto t = DecisionTree::split(0, 10, DecisionTree::split(1, 5, DecisionTree::leaf(0), DecisionTree::leaf(1)),
                                     DecisionTree::split(2, 7, DecisionTree::leaf(2), DecisionTree::leaf(3)));
  EXPECT_EQ(tree_predict(t, FeatureVector{10, 5, 99}), 0u);
  EXPECT_EQ(tree_predict(t, FeatureVector{10, 6, 99}), 1u);
  EXPECT_EQ(tree_predict(t, FeatureVector{11, 99, 7}), 2u);
  EXPECT_EQ(tree_predict(t, FeatureVector{11, 99, 8}), 3u);
  EXPECT_EQ(t.leaf_count(), 4u);
  EXPECT_EQ(t.depth(), 2u);
}

TEST(Predict, VoteConservationAndOracleAgreement) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> value(0, 250);
  for (int trial = 0; trial < 200; ++trial) {
    VotingEnsemble m{plain_schema(), {"A", "B", "C"}, {}, {}};
    for (int t = 0; t < 5; ++t) m.trees.push_back(testing::random_tree(rng, 4, 3, 3));
    if (trial % 2) {
      for (int t = 0; t < 5; ++t) m.weights.push_back(0.5 + t);
    }
    for (int k = 0; k < 20; ++k) {
      const FeatureVector x{value(rng), value(rng), value(rng)};
      const auto p = predict(m, x);
      double sum = p.anomalous_share;
      for (double s : p.class_scores) sum += s;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      const auto [label, score] = testing::oracle_vote(m, x);
      EXPECT_EQ(p.label, label);
      EXPECT_NEAR(p.score, score, 1e-12);
    }
  }
}

TEST(Thresholds, ConstantScores) {
  const auto t = make_threshold(0.94, 0.0);
  EXPECT_DOUBLE_EQ(t.t, 0.94);
}

TEST(Thresholds, ReportedEchoValues) {
  const auto t = make_threshold(0.94, 0.10);
  EXPECT_EQ(format_double(t.t), "0.84");
}

TEST(Thresholds, ClampedAtZero) { EXPECT_DOUBLE_EQ(make_threshold(0.2, 0.5).t, 0.0); }

// Rows of class A get scores 1.0, 0.9, 0.9, 0.8 from a ten-tree ensemble
// splitting on f1; the expected threshold comes from a two-pass oracle.
TEST(Thresholds, FourScoresAgainstTwoPassOracle) {
  VotingEnsemble m{plain_schema(1), {"A", "B"}, {}, {}};
  // Tree k votes A when f1 <= 10 - k, so row f1 = v gets A votes from trees with k <= 10 - v.
  for (int k = 0; k < 10; ++k) {
    m.trees.push_back(DecisionTree::split(0, 10 - k - 0.5, DecisionTree::leaf(0), DecisionTree::leaf(1)));
  }
  Dataset d{m.schema, {"A", "B"}, {}, {}};
  for (std::int64_t v : {0, 1, 1, 2}) d.add({v}, 0);
  d.add({50}, 1);
  const auto th = compute_thresholds(m, d);
  const auto s = testing::two_pass({1.0, 0.9, 0.9, 0.8});
  EXPECT_NEAR(th.at(0).mu, s.mu, 1e-12);
  EXPECT_NEAR(th.at(0).sigma, s.sigma, 1e-12);
  EXPECT_NEAR(th.at(0).t, s.mu - s.sigma, 1e-12);
  EXPECT_DOUBLE_EQ(th.at(1).t, 1.0);
}

TEST(Thresholds, ClassWithoutCorrectRowsIsNamed) {
  VotingEnsemble m{plain_schema(1), {"A", "quiet"}, {DecisionTree::leaf(0)}, {}};
  Dataset d{m.schema, {"A", "quiet"}, {}, {}};
  d.add({1}, 0);
  d.add({2}, 1);
  try {
    compute_thresholds(m, d);
    FAIL() << "expected ThresholdError";
  } catch (const ThresholdError& e) {
    EXPECT_NE(std::string(e.what()).find("quiet"), std::string::npos);
  }
}

TEST(Training, SeparableOneFeature) {
  Dataset d{plain_schema(1), {"lo", "hi"}, {}, {}};
  for (std::int64_t v = 0; v < 20; ++v) d.add({v}, 0);
  for (std::int64_t v = 30; v < 50; ++v) d.add({v}, 1);
  ForestParams p;
  p.n_trees = 1;
  p.max_depth = 1;
  p.bootstrap_fraction = 1.0;
  p.seed = 4;
  const auto m = train_random_forest(d, p);
  EXPECT_DOUBLE_EQ(accuracy(m, d), 1.0);
}

TEST(Training, DeterministicForSeed) {
  Dataset d = generate_dataset(BenignTraceModel::iot_default(), 30, 2);
  ForestParams p;
  p.n_trees = 10;
  p.seed = 9;
  EXPECT_EQ(save_model(train_random_forest(d, p), std::nullopt), save_model(train_random_forest(d, p), std::nullopt));
}

TEST(Training, SingleClassRejected) {
  Dataset d{plain_schema(1), {"A"}, {}, {}};
  d.add({1}, 0);
  d.add({2}, 0);
  EXPECT_THROW(train_random_forest(d, ForestParams{}), TrainerError);
}

TEST(Training, ThreeSyntheticClassesAbove95Percent) {
  const auto traffic = BenignTraceModel::iot_default();
  Dataset d{traffic.schema, {}, {}, {}};
  std::uint64_t seed = 21;
  for (const char* cls : {"smart_speaker", "motion_sensor", "security_camera"}) {
    const ClassId id = d.intern_class(cls);
    for (const auto& e : generate_benign_trace(traffic, cls, 200, seed++)) d.add(e.counts, id);
  }
  ForestParams p;
  p.n_trees = 20;
  p.seed = 1;
  const auto m = train_random_forest(d, p);
  EXPECT_GE(accuracy(m, d), 0.95);
  for (const auto& t : m.trees) {
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        EXPECT_LT(n.label, 3u);
      }
    }
  }
}

TEST(ModelIo, TwoTreeRoundTrip) {
  const auto doc = load_model_file(fixture("two_tree_model.json"));
  const auto again = load_model(save_model(doc.model, doc.thresholds));
  EXPECT_EQ(again.model, doc.model);
  EXPECT_EQ(again.thresholds, doc.thresholds);
}

TEST(ModelIo, ThresholdSurvivesBitExactly) {
  const auto m = single_leaf(0);
  ClassThresholds th{{make_threshold(0.94, 0.10), {0.5, 0.1, 0.1 + 0.2}}};
  const auto text = save_model(m, th);
  EXPECT_NE(text.find("\"0.84\""), std::string::npos);
  const auto back = load_model(text);
  ASSERT_TRUE(back.thresholds);
  EXPECT_EQ(back.thresholds->at(0).t, th.at(0).t);
  EXPECT_EQ(back.thresholds->at(1).t, 0.1 + 0.2);
}

TEST(ModelIo, MissingThresholdNamesNodePath) {
  const std::string doc = R"({"schema": {"features": ["f1", "f2"]}, "classes": ["A", "B"],
    "trees": [{"label": "A"},
              {"feature": "f1", "threshold": 3, "left": {"label": "A"},
               "right": {"feature": "f2", "left": {"label": "A"}, "right": {"label": "B"}}}]})";
  try {
    load_model(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("trees[1].right"), std::string::npos) << msg;
    EXPECT_NE(msg.find("threshold"), std::string::npos) << msg;
  }
}

TEST(ModelIo, UnknownLabelAndBadJson) {
  EXPECT_THROW(load_model(R"({"schema": {"features": ["f1"]}, "classes": ["A"], "trees": [{"label": "Z"}]})"),
               ParseError);
  EXPECT_THROW(load_model("{not json"), ParseError);
}

TEST(ModelIo, GuardsSurviveRoundTrip) {
  auto m = two_tree();
  m.trees[1].nodes[2].guards.push_back({0, 400});
  m.trees[1].nodes[2].guards.push_back({2, 12.5});
  const auto back = load_model(save_model(m, std::nullopt));
  EXPECT_EQ(back.model, m);
}

TEST(Dataset, CsvRoundTripAndErrors) {
  const auto schema = plain_schema(2);
  std::istringstream in("f2,f1,label\n3,1,A\n4,2,B\n");
  const auto d = read_dataset_csv(in, schema);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.rows[0], (FeatureVector{1, 3}));
  EXPECT_EQ(d.classes, (std::vector<std::string>{"A", "B"}));
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream again(out.str());
  EXPECT_EQ(read_dataset_csv(again, schema).rows, d.rows);

  std::istringstream negative("f1,f2,label\n1,-3,A\n");
  EXPECT_THROW(read_dataset_csv(negative, schema), Error);
  std::istringstream missing("f1,label\n1,A\n");
  EXPECT_THROW(read_dataset_csv(missing, schema), ParseError);
  std::istringstream ragged("f1,f2,label\n1,A\n");
  EXPECT_THROW(read_dataset_csv(ragged, schema), ParseError);
}

TEST(Schema, InvariantsEnforced) {
  EXPECT_THROW(FeatureSchema({{"a", Direction::kIn, Unit::kPkt}, {"a", Direction::kIn, Unit::kPkt}}, {}), SchemaError);
  EXPECT_THROW(FeatureSchema({{"b", Direction::kIn, Unit::kByte}}, {}), SchemaError);
  EXPECT_THROW(testing::pair_schema(0, 10), SchemaError);
  EXPECT_THROW(testing::pair_schema(100, 64), SchemaError);
  const auto iot = FeatureSchema::iot_default();
  EXPECT_EQ(iot.size(), 16u);
  EXPECT_EQ(iot.flow_pairs().size(), 8u);
  EXPECT_EQ(iot.frame_min(), 64);
  EXPECT_EQ(iot.frame_max(), 1518);
}

}  // namespace
}  // namespace treeaudit
