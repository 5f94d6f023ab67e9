#ifndef TREEALIGN_ALIGN_HPP
#define TREEALIGN_ALIGN_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treealign/tree.hpp"

namespace treealign {

enum class LabelMode { unlabeled, exact_label };

struct AlignOptions {
  LabelMode label_mode = LabelMode::unlabeled;
  // When false, leaf nodes (preterminals) can neither be aligned nor counted.
  bool include_preterminals = true;
};

// Nodes are identified by their preorder id (see preorder_paths()).
struct AlignedPair {
  std::size_t node1;
  std::size_t node2;
  double iou;
};

struct Alignment {
  std::vector<AlignedPair> pairs;  // sorted by (node1, node2)
  double total_weight = 0.0;       // sum of pair IoUs, accumulated in ascending order
};

struct StructIoUScore {
  double score = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double weight = 0.0;
};

// Two matchings are conflicted when they disagree on an ancestor or
// descendant relation between the trees.
bool conflicted(const SegmentTree& t1, const SegmentTree& t2, const AlignedPair& a, const AlignedPair& b);

// Maximum IoU-weighted conflict-free one-to-one alignment between the real
// nodes of two trees. Both trees must validate (ValidationError otherwise).
//
// The general problem is reduced to the root-aligned one by giving each tree
// a dummy root covering both envelopes; the dummy pair only scaffolds the
// recursion and never appears in the result. Root-aligned subproblems are
// solved bottom-up over pairs of subtrees. For each pair, the best sequence
// of disjoint aligned descendant pairs is a 2-D longest-chain problem over
// coordinate-compressed endpoints, solved with a prefix-maximum table. Pairs
// with zero overlap are never aligned since they contribute nothing.
// Cost is O(n^2 m^2) in the worst case.
Alignment max_alignment(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options = {});

// Exhaustive search over conflict-free one-to-one alignments, checking the
// conflict predicate directly. Intended as a reference for max_alignment.
// Throws std::invalid_argument when n1 + n2 exceeds `max_total_nodes`.
Alignment oracle_alignment(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options = {},
                           std::size_t max_total_nodes = 20);

// Describes the first problem found in `a` (duplicate node, conflicted pair,
// wrong IoU, disallowed label pair, or a total that is not the pair sum), or
// nullopt if the alignment is well-formed.
std::optional<std::string> alignment_defect(const SegmentTree& t1, const SegmentTree& t2, const Alignment& a,
                                            const AlignOptions& options = {});

// 2 * weight / (n1 + n2); 1.0 when both counts are zero.
StructIoUScore struct_iou(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options = {});

struct TreePair {
  std::string id;
  SegmentTree gold;
  SegmentTree pred;
};

struct SentenceScore {
  std::string id;
  StructIoUScore score;
};

struct EvalReport {
  double corpus = 0.0;         // (n1 + n2)-weighted mean of sentence scores
  double sentence_mean = 0.0;  // unweighted mean
  std::vector<SentenceScore> sentences;
};

// Sentences may be scored on `jobs` threads; the reduction always runs in
// corpus order. Throws DataError on an empty corpus.
EvalReport corpus_struct_iou(std::span<const TreePair> pairs, const AlignOptions& options = {}, unsigned jobs = 1);

// Aggregates already-computed sentence scores.
EvalReport aggregate(std::vector<SentenceScore> sentences);

}  // namespace treealign

#endif  // TREEALIGN_ALIGN_HPP
