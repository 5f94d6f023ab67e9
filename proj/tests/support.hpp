// Fixtures and random generators shared by the unit and acceptance tests.
#ifndef TREEALIGN_TESTS_SUPPORT_HPP
#define TREEALIGN_TESTS_SUPPORT_HPP

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "treealign/bracket.hpp"
#include "treealign/tree.hpp"

namespace treealign::testing {

inline SegmentNode leaf(std::string label, double s, double e) { return SegmentNode{std::move(label), {s, e}, {}}; }

inline SegmentNode node(std::string label, std::vector<SegmentNode> children) {
  const double s = children.front().interval.start();
  const double e = children.back().interval.end();
  return SegmentNode{std::move(label), {s, e}, std::move(children)};
}

// "Your turn" ground truth and two predictions of it.
inline SegmentTree your_turn_gold() { return SegmentTree(node("NP", {leaf("PRP", 2.56, 2.72), leaf("NN", 2.72, 3.01)})); }

inline SegmentTree your_turn_pred() {
  return SegmentTree(
      node("VP", {leaf("VBP", 2.55, 2.56), node("NP", {leaf("PRP", 2.56, 2.72), leaf("NN", 2.72, 3.01)})}));
}

inline SegmentTree your_turn_shifted() { return SegmentTree(node("NP", {leaf("PRP", 2.51, 2.70), leaf("NN", 2.70, 3.10)})); }

inline const char* kCatGold = "(S (NP (DT The) (NN cat)) (VP (V sat) (PP (IN on) (NP (DT the) (NN mat)))))";
inline const char* kCatPred = "(S (NP (DT The) (NN cat)) (VP (V sat) (NP (DT on) (NN the) (NN mat))))";

// The two readings of "N P N P N": right-branching and left-branching PP
// attachment.
inline const char* kAmbiguousRight = "(NP (NP (N n)) (PP (P p) (NP (NP (N n)) (PP (P p) (NP (N n))))))";
inline const char* kAmbiguousLeft = "(NP (NP (NP (N n)) (PP (P p) (NP (N n)))) (PP (P p) (NP (N n))))";

inline const std::vector<std::string> kLabels{"A", "B", "C", "D"};

// Random valid relaxed segment tree with at most `max_nodes` nodes over the
// grid [offset, offset + width] / denominator. The node budget is drawn from
// [min_nodes, max_nodes]; early leaves can leave it unspent. Children may
// leave gaps and unary chains are allowed.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  SegmentTree tree(int max_nodes, int width = 12, int offset = 0, int min_nodes = 1) {
    denominator_ = pick(1, 8);
    const int size = pick(min_nodes, max_nodes);
    return SegmentTree(build(offset, offset + width, size));
  }

  // Random binary tree whose leaves are the given word spans.
  SegmentTree binary_over(const BoundarySequence& b) {
    return SegmentTree(binary(b, 0, b.word_count()));
  }

  // Random boundary sequence of n words with durations U(lo, hi).
  BoundarySequence boundaries(std::size_t n, double lo = 0.1, double hi = 0.6) {
    std::uniform_real_distribution<double> dur(lo, hi);
    std::vector<std::string> words;
    std::vector<double> bounds{0.0};
    for (std::size_t i = 0; i < n; ++i) {
      words.push_back("w" + std::to_string(i));
      bounds.push_back(bounds.back() + dur(rng_));
    }
    return BoundarySequence(std::move(words), std::move(bounds));
  }

  // Random bracketed parse over n words with preterminals.
  ParseNode parse(int n) { return parse_range(0, n); }

 private:
  SegmentNode build(int lo, int hi, int budget) {
    const std::string label = kLabels[static_cast<std::size_t>(pick(0, 3))];
    const int width = hi - lo;
    const int max_children = std::min({3, budget - 1, width});
    if (max_children < 1 || pick(0, 5) == 0) return SegmentNode{label, scaled(lo, hi), {}};
    const int k = pick(1, max_children);
    // k children at distinct cut points; interior children may start late.
    std::vector<int> cuts;
    for (int x = lo + 1; x < hi; ++x) cuts.push_back(x);
    std::shuffle(cuts.begin(), cuts.end(), rng_);
    cuts.resize(static_cast<std::size_t>(k - 1));
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> budgets(static_cast<std::size_t>(k), 1);
    for (int extra = budget - 1 - k; extra > 0; --extra) ++budgets[static_cast<std::size_t>(pick(0, k - 1))];
    std::vector<SegmentNode> children;
    for (int j = 0; j < k; ++j) {
      int s = cuts[static_cast<std::size_t>(j)];
      const int e = cuts[static_cast<std::size_t>(j) + 1];
      if (j > 0 && e - s >= 2 && pick(0, 2) == 0) s += pick(1, e - s - 1);
      children.push_back(build(s, e, budgets[static_cast<std::size_t>(j)]));
    }
    return SegmentNode{label, Interval(children.front().interval.start(), children.back().interval.end()),
                       std::move(children)};
  }

  Interval scaled(int lo, int hi) const { return Interval(double(lo) / denominator_, double(hi) / denominator_); }

  SegmentNode binary(const BoundarySequence& b, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return SegmentNode{"W", b.word_span(lo), {}};
    const auto cut = std::uniform_int_distribution<std::size_t>(lo + 1, hi - 1)(rng_);
    std::vector<SegmentNode> children{binary(b, lo, cut), binary(b, cut, hi)};
    return SegmentNode{"X", Interval(b.boundaries()[lo], b.boundaries()[hi]), std::move(children)};
  }

  ParseNode parse_range(int lo, int hi) {
    const std::string label = kLabels[static_cast<std::size_t>(pick(0, 3))];
    if (hi - lo == 1 && pick(0, 3) != 0) return ParseNode{label, {}, "w" + std::to_string(lo)};
    if (hi - lo == 1) return ParseNode{label, {parse_range(lo, hi)}, std::nullopt};
    const int k = pick(1, std::min(3, hi - lo));
    std::vector<int> cuts;
    for (int x = lo + 1; x < hi; ++x) cuts.push_back(x);
    std::shuffle(cuts.begin(), cuts.end(), rng_);
    cuts.resize(static_cast<std::size_t>(k - 1));
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    ParseNode out{label, {}, std::nullopt};
    for (int j = 0; j < k; ++j) out.children.push_back(parse_range(cuts[j], cuts[j + 1]));
    return out;
  }

  std::mt19937_64 rng_;
  int denominator_ = 1;
};

// Balanced binary tree with `leaves` unit-width leaves (2 * leaves - 1 nodes).
inline SegmentNode balanced(int lo, int hi) {
  if (hi - lo == 1) return SegmentNode{"W", Interval(lo, hi), {}};
  const int mid = lo + (hi - lo) / 2;
  std::vector<SegmentNode> children{balanced(lo, mid), balanced(mid, hi)};
  return SegmentNode{"X", Interval(lo, hi), std::move(children)};
}

// Maximum one-to-one matching between two boundary lists where a pair is
// allowed when |r - h| <= tol, by exhaustive search.
inline std::size_t brute_force_matching(const std::vector<double>& ref, const std::vector<double>& hyp, double tol,
                                        std::size_t i = 0, std::vector<bool>* used = nullptr) {
  std::vector<bool> local(hyp.size(), false);
  if (!used) used = &local;
  if (i == ref.size()) return 0;
  std::size_t best = brute_force_matching(ref, hyp, tol, i + 1, used);
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    if ((*used)[j] || std::abs(ref[i] - hyp[j]) > tol) continue;
    (*used)[j] = true;
    best = std::max(best, 1 + brute_force_matching(ref, hyp, tol, i + 1, used));
    (*used)[j] = false;
  }
  return best;
}

}  // namespace treealign::testing

#endif  // TREEALIGN_TESTS_SUPPORT_HPP
