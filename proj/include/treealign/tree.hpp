#ifndef TREEALIGN_TREE_HPP
#define TREEALIGN_TREE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "treealign/bracket.hpp"
#include "treealign/interval.hpp"

namespace treealign {

enum class Unit { seconds, word_index, char_index };

// A node of a relaxed segment tree. Leaves are the nodes without children;
// for projected text parses these are the preterminals.
struct SegmentNode {
  std::string label;
  Interval interval;
  std::vector<SegmentNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
};

// Immutable relaxed segment tree. Construction orders every child list by
// start (stable) and caches the node count; it does not validate. Use
// validate() / require_valid() for the structural conditions.
class SegmentTree {
 public:
  explicit SegmentTree(SegmentNode root, Unit unit = Unit::seconds);

  const SegmentNode& root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return node_count_; }
  Unit unit() const noexcept { return unit_; }

 private:
  SegmentNode root_;
  std::size_t node_count_;
  Unit unit_;
};

// Child-index path from the root; the root is the empty path.
using NodePath = std::vector<std::size_t>;

const SegmentNode& node_at(const SegmentTree& tree, const NodePath& path);

// Paths of all nodes in preorder. Index k of the result is the node with
// preorder id k.
std::vector<NodePath> preorder_paths(const SegmentTree& tree);

struct Violation {
  enum class Condition { overlapping_children, span_law };
  NodePath path;
  Condition condition;
  std::string message;
};

std::string_view to_string(Violation::Condition condition);

// Empty iff every node has pairwise disjoint children and every nonterminal
// spans exactly from its first child's start to its last child's end.
std::vector<Violation> validate(const SegmentTree& tree);

// Throws ValidationError describing the first violation, if any.
void require_valid(const SegmentTree& tree);

// Number of nodes; leaves (preterminals) are skipped when
// `include_preterminals` is false.
std::size_t count_nodes(const SegmentTree& tree, bool include_preterminals = true);

// Word boundaries b_0 < b_1 < ... < b_n; word i occupies (b_i, b_{i+1}).
class BoundarySequence {
 public:
  BoundarySequence(std::vector<std::string> words, std::vector<double> boundaries);

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  Interval word_span(std::size_t i) const { return Interval(boundaries_[i], boundaries_[i + 1]); }

  friend bool operator==(const BoundarySequence&, const BoundarySequence&) = default;

 private:
  std::vector<std::string> words_;
  std::vector<double> boundaries_;
};

struct WordSpan {
  std::string word;
  double start;
  double end;
};

std::vector<WordSpan> word_spans(const BoundarySequence& b);

// Closes inter-word gaps: durations are kept, each word starts where the
// previous one ended and the first start is unchanged. Throws DataError on
// overlapping or empty spans.
BoundarySequence remove_gaps(std::span<const WordSpan> spans);

enum class Granularity { word, character };

// Projects a discrete parse onto unit coordinates: leaf k covers (k, k+1) at
// word granularity, or one unit per UTF-8 code point of the concatenated leaf
// text at character granularity.
SegmentTree project_text(const ParseNode& parse, Granularity granularity = Granularity::word);

struct AttachOptions {
  bool case_insensitive = false;
};

// Places leaf k of the parse on (b_k, b_{k+1}). Throws DataError on a word
// count or word text mismatch.
SegmentTree attach_boundaries(const ParseNode& parse, const BoundarySequence& b,
                              const AttachOptions& options = {});

// Leaf intervals of a tree with contiguous leaves, as a boundary sequence
// whose words are the leaf labels. Throws DataError if leaves leave gaps.
BoundarySequence leaf_boundaries(const SegmentTree& tree);

// Same shape with leaf k moved to (b_k, b_{k+1}) and envelopes recomputed.
SegmentTree retime_leaves(const SegmentTree& tree, const BoundarySequence& b);

}  // namespace treealign

#endif  // TREEALIGN_TREE_HPP
