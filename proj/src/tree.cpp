#include "treealign/tree.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "treealign/error.hpp"

namespace treealign {

namespace {

std::size_t normalize(SegmentNode& node) {
  std::stable_sort(node.children.begin(), node.children.end(),
                   [](const SegmentNode& a, const SegmentNode& b) { return a.interval.start() < b.interval.start(); });
  std::size_t count = 1;
  for (auto& child : node.children) count += normalize(child);
  return count;
}

std::string path_string(const NodePath& path) {
  std::string out = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(path[i]);
  }
  return out;
}

void validate_node(const SegmentNode& node, NodePath& path, std::vector<Violation>& out) {
  const auto& kids = node.children;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    for (std::size_t j = i + 1; j < kids.size(); ++j) {
      if (intersection_size(kids[i].interval, kids[j].interval) > 0.0) {
        std::ostringstream msg;
        msg << "node " << path_string(path) << " '" << node.label << "': children " << i << " "
            << kids[i].interval << " and " << j << " " << kids[j].interval << " overlap";
        out.push_back({path, Violation::Condition::overlapping_children, msg.str()});
      }
    }
  }
  if (!kids.empty()) {
    double lo = kids.front().interval.start();
    double hi = kids.front().interval.end();
    for (const auto& child : kids) {
      lo = std::min(lo, child.interval.start());
      hi = std::max(hi, child.interval.end());
    }
    if (!coord_equal(lo, node.interval.start()) || !coord_equal(hi, node.interval.end())) {
      std::ostringstream msg;
      msg << "node " << path_string(path) << " '" << node.label << "' spans " << node.interval
          << " but its children span (" << lo << ", " << hi << ")";
      out.push_back({path, Violation::Condition::span_law, msg.str()});
    }
  }
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    validate_node(kids[i], path, out);
    path.pop_back();
  }
}

void collect_paths(const SegmentNode& node, NodePath& path, std::vector<NodePath>& out) {
  out.push_back(path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    collect_paths(node.children[i], path, out);
    path.pop_back();
  }
}

std::size_t count_if_counted(const SegmentNode& node, bool include_leaves) {
  std::size_t count = node.is_leaf() ? (include_leaves ? 1 : 0) : 1;
  for (const auto& child : node.children) count += count_if_counted(child, include_leaves);
  return count;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

// Builds the segment node for a parse node given per-leaf spans, consuming
// spans left to right.
SegmentNode build(const ParseNode& parse, std::span<const Interval> leaf_spans, std::size_t& next_leaf) {
  if (parse.is_preterminal()) return SegmentNode{parse.label, leaf_spans[next_leaf++], {}};
  std::vector<SegmentNode> children;
  children.reserve(parse.children.size());
  for (const auto& child : parse.children) children.push_back(build(child, leaf_spans, next_leaf));
  Interval span(children.front().interval.start(), children.back().interval.end());
  return SegmentNode{parse.label, span, std::move(children)};
}

SegmentTree build_tree(const ParseNode& parse, std::span<const Interval> leaf_spans, Unit unit) {
  std::size_t next = 0;
  return SegmentTree(build(parse, leaf_spans, next), unit);
}

bool same_word(const std::string& a, const std::string& b, bool case_insensitive) {
  if (!case_insensitive) return a == b;
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

void collect_leaves(const SegmentNode& node, std::vector<const SegmentNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& child : node.children) collect_leaves(child, out);
}

SegmentNode retime(const SegmentNode& node, const BoundarySequence& b, std::size_t& next_leaf) {
  if (node.is_leaf()) {
    const std::size_t k = next_leaf++;
    return SegmentNode{node.label, b.word_span(k), {}};
  }
  std::vector<SegmentNode> children;
  children.reserve(node.children.size());
  for (const auto& child : node.children) children.push_back(retime(child, b, next_leaf));
  Interval span(children.front().interval.start(), children.back().interval.end());
  return SegmentNode{node.label, span, std::move(children)};
}

}  // namespace

SegmentTree::SegmentTree(SegmentNode root, Unit unit) : root_(std::move(root)), node_count_(0), unit_(unit) {
  node_count_ = normalize(root_);
}

const SegmentNode& node_at(const SegmentTree& tree, const NodePath& path) {
  const SegmentNode* node = &tree.root();
  for (std::size_t i : path) {
    if (i >= node->children.size()) throw std::out_of_range("node path out of range");
    node = &node->children[i];
  }
  return *node;
}

std::vector<NodePath> preorder_paths(const SegmentTree& tree) {
  std::vector<NodePath> out;
  out.reserve(tree.node_count());
  NodePath path;
  collect_paths(tree.root(), path, out);
  return out;
}

std::string_view to_string(Violation::Condition condition) {
  switch (condition) {
    case Violation::Condition::overlapping_children:
      return "overlapping_children";
    case Violation::Condition::span_law:
      return "span_law";
  }
  return "unknown";
}

std::vector<Violation> validate(const SegmentTree& tree) {
  std::vector<Violation> out;
  NodePath path;
  validate_node(tree.root(), path, out);
  return out;
}

void require_valid(const SegmentTree& tree) {
  const auto violations = validate(tree);
  if (!violations.empty()) {
    throw ValidationError(std::string(to_string(violations.front().condition)) + ": " + violations.front().message);
  }
}

std::size_t count_nodes(const SegmentTree& tree, bool include_preterminals) {
  if (include_preterminals) return tree.node_count();
  return count_if_counted(tree.root(), false);
}

BoundarySequence::BoundarySequence(std::vector<std::string> words, std::vector<double> boundaries)
    : words_(std::move(words)), boundaries_(std::move(boundaries)) {
  if (words_.empty()) throw ValidationError("boundary sequence needs at least one word");
  if (boundaries_.size() != words_.size() + 1) {
    throw ValidationError("boundary sequence with " + std::to_string(words_.size()) + " words needs " +
                          std::to_string(words_.size() + 1) + " boundaries, got " +
                          std::to_string(boundaries_.size()));
  }
  for (std::size_t i = 0; i + 1 < boundaries_.size(); ++i) {
    if (!coord_less(boundaries_[i], boundaries_[i + 1])) {
      throw ValidationError("boundaries must be strictly increasing (index " + std::to_string(i) + ": " +
                            std::to_string(boundaries_[i]) + " -> " + std::to_string(boundaries_[i + 1]) + ")");
    }
  }
}

std::vector<WordSpan> word_spans(const BoundarySequence& b) {
  std::vector<WordSpan> out;
  out.reserve(b.word_count());
  for (std::size_t i = 0; i < b.word_count(); ++i) {
    out.push_back({b.words()[i], b.boundaries()[i], b.boundaries()[i + 1]});
  }
  return out;
}

BoundarySequence remove_gaps(std::span<const WordSpan> spans) {
  if (spans.empty()) throw DataError("cannot build boundaries from zero words");
  std::vector<std::string> words;
  std::vector<double> bounds;
  words.reserve(spans.size());
  bounds.reserve(spans.size() + 1);
  bounds.push_back(spans.front().start);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (!coord_less(s.start, s.end)) {
      throw DataError("word " + std::to_string(i) + " '" + s.word + "' has a non-positive duration");
    }
    if (i > 0 && coord_less(s.start, spans[i - 1].end)) {
      throw DataError("word " + std::to_string(i) + " '" + s.word + "' overlaps the previous word");
    }
    words.push_back(s.word);
    // Gapless input passes through untouched so the operation is idempotent.
    if (i > 0 && coord_equal(s.start, spans[i - 1].end) && bounds.back() == spans[i - 1].end) {
      bounds.push_back(s.end);
    } else {
      bounds.push_back(bounds.back() + (s.end - s.start));
    }
  }
  return BoundarySequence(std::move(words), std::move(bounds));
}

SegmentTree project_text(const ParseNode& parse, Granularity granularity) {
  const auto words = leaf_words(parse);
  std::vector<Interval> spans;
  spans.reserve(words.size());
  double cursor = 0.0;
  for (const auto& w : words) {
    const double width = granularity == Granularity::word ? 1.0 : static_cast<double>(utf8_length(w));
    spans.emplace_back(cursor, cursor + width);
    cursor += width;
  }
  return build_tree(parse, spans, granularity == Granularity::word ? Unit::word_index : Unit::char_index);
}

SegmentTree attach_boundaries(const ParseNode& parse, const BoundarySequence& b, const AttachOptions& options) {
  const auto words = leaf_words(parse);
  if (words.size() != b.word_count()) {
    throw DataError("parse has " + std::to_string(words.size()) + " words but the boundary sequence has " +
                    std::to_string(b.word_count()));
  }
  std::vector<Interval> spans;
  spans.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!same_word(words[i], b.words()[i], options.case_insensitive)) {
      throw DataError("word " + std::to_string(i) + " differs: parse has '" + words[i] + "', boundaries have '" +
                      b.words()[i] + "'");
    }
    spans.push_back(b.word_span(i));
  }
  return build_tree(parse, spans, Unit::seconds);
}

BoundarySequence leaf_boundaries(const SegmentTree& tree) {
  std::vector<const SegmentNode*> leaves;
  collect_leaves(tree.root(), leaves);
  std::vector<std::string> words;
  std::vector<double> bounds{leaves.front()->interval.start()};
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i > 0 && !coord_equal(leaves[i]->interval.start(), bounds.back())) {
      throw DataError("leaf " + std::to_string(i) + " does not start where leaf " + std::to_string(i - 1) +
                      " ends; leaves must be contiguous");
    }
    words.push_back(leaves[i]->label);
    bounds.push_back(leaves[i]->interval.end());
  }
  return BoundarySequence(std::move(words), std::move(bounds));
}

SegmentTree retime_leaves(const SegmentTree& tree, const BoundarySequence& b) {
  std::vector<const SegmentNode*> leaves;
  collect_leaves(tree.root(), leaves);
  if (leaves.size() != b.word_count()) {
    throw DataError("tree has " + std::to_string(leaves.size()) + " leaves but the boundary sequence has " +
                    std::to_string(b.word_count()) + " words");
  }
  std::size_t next = 0;
  return SegmentTree(retime(tree.root(), b, next), tree.unit());
}

}  // namespace treealign
