#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"
#include "treealign/align.hpp"
#include "treealign/error.hpp"

using namespace treealign;
using namespace treealign::testing;

namespace {

const AlignOptions kLabeled{.label_mode = LabelMode::exact_label};

}  // namespace

TEST(MaxAlignment, YourTurn) {
  const Alignment a = max_alignment(your_turn_gold(), your_turn_pred());
  EXPECT_EQ(a.total_weight, 3.0);
  ASSERT_EQ(a.pairs.size(), 3u);
  // Gold NP, PRP, NN against predicted NP, PRP, NN (preorder ids 2, 3, 4).
  EXPECT_EQ(a.pairs[0].node1, 0u);
  EXPECT_EQ(a.pairs[0].node2, 2u);
  EXPECT_EQ(a.pairs[1].node2, 3u);
  EXPECT_EQ(a.pairs[2].node2, 4u);
  EXPECT_FALSE(alignment_defect(your_turn_gold(), your_turn_pred(), a));
}

TEST(MaxAlignment, Identity) {
  const SegmentTree t(node("S", {node("A", {leaf("a", 0, 1)}), leaf("b", 1, 2)}));
  const Alignment a = max_alignment(t, t);
  EXPECT_EQ(a.total_weight, 4.0);
  for (const auto& p : a.pairs) EXPECT_EQ(p.node1, p.node2);
}

TEST(MaxAlignment, DisjointSingletons) {
  const Alignment a = max_alignment(SegmentTree(leaf("A", 0, 1)), SegmentTree(leaf("A", 2, 3)));
  EXPECT_EQ(a.total_weight, 0.0);
  EXPECT_TRUE(a.pairs.empty());
}

TEST(MaxAlignment, RejectsInvalidTrees) {
  const SegmentTree bad(SegmentNode{"NP", {0, 2}, {leaf("DT", 0, 1), leaf("NN", 0.5, 2)}});
  EXPECT_THROW(max_alignment(bad, your_turn_gold()), ValidationError);
}

TEST(MaxAlignment, LabeledForbidsCrossLabelPairs) {
  const SegmentTree a(leaf("A", 0, 1));
  const SegmentTree b(leaf("B", 0, 1));
  EXPECT_EQ(max_alignment(a, b).total_weight, 1.0);
  EXPECT_EQ(max_alignment(a, b, kLabeled).total_weight, 0.0);
}

TEST(MaxAlignment, WithoutPreterminals) {
  const AlignOptions opts{.include_preterminals = false};
  const StructIoUScore s = struct_iou(your_turn_gold(), your_turn_pred(), opts);
  EXPECT_EQ(s.n1, 1u);
  EXPECT_EQ(s.n2, 2u);
  EXPECT_DOUBLE_EQ(s.score, 2.0 / 3.0);
}

TEST(Oracle, Examples) {
  EXPECT_EQ(oracle_alignment(your_turn_gold(), your_turn_pred()).total_weight, 3.0);
  EXPECT_EQ(oracle_alignment(SegmentTree(leaf("A", 0, 1)), SegmentTree(leaf("B", 0, 1))).total_weight, 1.0);
  EXPECT_THROW(oracle_alignment(your_turn_pred(), your_turn_pred(), {}, 6), std::invalid_argument);
}

TEST(Conflict, AncestorDisagreement) {
  const SegmentTree g = your_turn_gold();
  const SegmentTree p = your_turn_pred();
  // NP-NP with PRP-PRP keeps the ancestor relation; crossing the pairs
  // inverts it.
  EXPECT_FALSE(conflicted(g, p, {0, 2, 1}, {1, 3, 1}));
  EXPECT_TRUE(conflicted(g, p, {1, 2, 1}, {0, 3, 1}));
  EXPECT_TRUE(conflicted(g, p, {0, 3, 1}, {1, 2, 1}));
}

TEST(StructIou, YourTurn) {
  const StructIoUScore left = struct_iou(your_turn_gold(), your_turn_pred());
  EXPECT_NEAR(left.score, 0.75, 1e-12);
  EXPECT_EQ(left.n1, 3u);
  EXPECT_EQ(left.n2, 5u);
  // Hand arithmetic on the printed endpoints.
  const StructIoUScore right = struct_iou(your_turn_gold(), your_turn_shifted());
  EXPECT_NEAR(right.score, (0.45 / 0.59 + 0.14 / 0.21 + 0.29 / 0.40) / 3.0, 1e-12);
  EXPECT_NEAR(right.score, 0.718, 1e-3);
}

TEST(StructIou, BothEmptyCountsScoreOne) {
  const AlignOptions opts{.include_preterminals = false};
  const SegmentTree a(leaf("A", 0, 1));
  EXPECT_EQ(struct_iou(a, a, opts).score, 1.0);
}

TEST(Properties, DpMatchesOracleAndInvariants) {
  TreeGen gen(2024);
  for (int k = 0; k < 300; ++k) {
    const SegmentTree t1 = gen.tree(8);
    const SegmentTree t2 = gen.tree(8, 12, gen.pick(-2, 2));
    for (const AlignOptions& opts : {AlignOptions{}, kLabeled, AlignOptions{.include_preterminals = false}}) {
      const Alignment dp = max_alignment(t1, t2, opts);
      const Alignment brute = oracle_alignment(t1, t2, opts);
      EXPECT_NEAR(dp.total_weight, brute.total_weight, 1e-9);
      const auto defect = alignment_defect(t1, t2, dp, opts);
      EXPECT_FALSE(defect) << *defect;
      const bool pre = opts.include_preterminals;
      EXPECT_LE(dp.total_weight, std::min(count_nodes(t1, pre), count_nodes(t2, pre)) + 1e-12);
    }
    EXPECT_LE(max_alignment(t1, t2, kLabeled).total_weight, max_alignment(t1, t2).total_weight + 1e-12);
    EXPECT_EQ(struct_iou(t1, t2).score, struct_iou(t2, t1).score);
    EXPECT_EQ(struct_iou(t1, t1).score, 1.0);
  }
}

TEST(Corpus, WeightedMean) {
  std::vector<SentenceScore> s{{"a", {1.0, 2, 2, 2.0}}, {"b", {0.5, 6, 6, 3.0}}};
  const EvalReport r = aggregate(s);
  // (4 * 1.0 + 12 * 0.5) / (4 + 12)
  EXPECT_NEAR(r.corpus, 0.625, 1e-15);
  EXPECT_NEAR(r.sentence_mean, 0.75, 1e-15);
  EXPECT_THROW(aggregate({}), DataError);
}

TEST(Corpus, SinglePairAndIdentical) {
  const std::vector<TreePair> one{{"x", your_turn_gold(), your_turn_pred()}};
  EXPECT_EQ(corpus_struct_iou(one).corpus, struct_iou(your_turn_gold(), your_turn_pred()).score);
  const std::vector<TreePair> same{{"a", your_turn_gold(), your_turn_gold()}, {"b", your_turn_pred(), your_turn_pred()}};
  EXPECT_EQ(corpus_struct_iou(same).corpus, 1.0);
}

TEST(Corpus, JobsDoNotChangeResults) {
  TreeGen gen(5);
  std::vector<TreePair> pairs;
  for (int k = 0; k < 40; ++k) pairs.push_back({std::to_string(k), gen.tree(10), gen.tree(10)});
  const EvalReport serial = corpus_struct_iou(pairs, {}, 1);
  const EvalReport parallel = corpus_struct_iou(pairs, {}, 4);
  EXPECT_EQ(serial.corpus, parallel.corpus);
  EXPECT_EQ(serial.sentence_mean, parallel.sentence_mean);
  for (std::size_t k = 0; k < pairs.size(); ++k) EXPECT_EQ(serial.sentences[k].score.score, parallel.sentences[k].score.score);
}
