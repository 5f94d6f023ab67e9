#include "treealign/align.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "treealign/error.hpp"

namespace treealign {

namespace {

// Preorder arrays of a tree, optionally preceded by a dummy root at index 0.
struct FlatTree {
  std::vector<double> start;
  std::vector<double> end;
  std::vector<const std::string*> label;  // nullptr for the dummy root
  std::vector<std::size_t> last;          // one past the subtree's last preorder id
  std::vector<bool> leaf;

  std::size_t size() const { return start.size(); }
  bool is_ancestor(std::size_t a, std::size_t d) const { return a < d && d < last[a]; }
};

void flatten_into(const SegmentNode& node, FlatTree& out) {
  const std::size_t id = out.size();
  out.start.push_back(node.interval.start());
  out.end.push_back(node.interval.end());
  out.label.push_back(&node.label);
  out.last.push_back(0);
  out.leaf.push_back(node.is_leaf());
  for (const auto& child : node.children) flatten_into(child, out);
  out.last[id] = out.size();
}

FlatTree flatten(const SegmentTree& tree, const Interval* dummy = nullptr) {
  FlatTree out;
  if (dummy) {
    out.start.push_back(dummy->start());
    out.end.push_back(dummy->end());
    out.label.push_back(nullptr);
    out.last.push_back(0);
    out.leaf.push_back(false);
  }
  flatten_into(tree.root(), out);
  if (dummy) out.last[0] = out.size();
  return out;
}

double node_iou(const FlatTree& a, std::size_t i, const FlatTree& b, std::size_t j) {
  return iou(Interval(a.start[i], a.end[i]), Interval(b.start[j], b.end[j]));
}

bool labels_compatible(const FlatTree& a, std::size_t i, const FlatTree& b, std::size_t j, LabelMode mode) {
  if (mode == LabelMode::unlabeled) return true;
  if (!a.label[i] || !b.label[j]) return true;  // dummy roots match anything
  return *a.label[i] == *b.label[j];
}

bool pair_allowed(const FlatTree& a, std::size_t i, const FlatTree& b, std::size_t j, const AlignOptions& options) {
  if (!options.include_preterminals && (a.leaf[i] || b.leaf[j])) return false;
  return labels_compatible(a, i, b, j, options.label_mode);
}

bool conflicted_flat(const FlatTree& a, const FlatTree& b, std::size_t i, std::size_t j, std::size_t k,
                     std::size_t l) {
  const bool anc_a = a.is_ancestor(i, k);
  const bool anc_b = b.is_ancestor(j, l);
  const bool desc_a = a.is_ancestor(k, i);
  const bool desc_b = b.is_ancestor(l, j);
  return (anc_a && !anc_b) || (!anc_a && anc_b) || (desc_a && !desc_b) || (!desc_a && desc_b);
}

// Sum in ascending order so that mirrored alignments give identical totals.
double ordered_sum(const std::vector<AlignedPair>& pairs) {
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& p : pairs) values.push_back(p.iou);
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

Alignment finish(std::vector<AlignedPair> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const AlignedPair& x, const AlignedPair& y) {
    return std::tie(x.node1, x.node2) < std::tie(y.node1, y.node2);
  });
  Alignment out;
  out.total_weight = ordered_sum(pairs);
  out.pairs = std::move(pairs);
  return out;
}

// Epsilon-aware coordinate compression of every endpoint in a tree.
class Coordinates {
 public:
  explicit Coordinates(const FlatTree& t) {
    std::vector<double> all(t.start);
    all.insert(all.end(), t.end.begin(), t.end.end());
    std::sort(all.begin(), all.end());
    for (double v : all) {
      if (values_.empty() || v - values_.back() > coordinate_epsilon()) values_.push_back(v);
    }
    start_.reserve(t.size());
    end_.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      start_.push_back(index_of(t.start[i]));
      end_.push_back(index_of(t.end[i]));
    }
  }

  Eigen::Index count() const { return static_cast<Eigen::Index>(values_.size()); }
  Eigen::Index start(std::size_t node) const { return start_[node]; }
  Eigen::Index end(std::size_t node) const { return end_[node]; }

 private:
  Eigen::Index index_of(double v) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), v + coordinate_epsilon());
    return static_cast<Eigen::Index>(it - values_.begin()) - 1;
  }

  std::vector<double> values_;
  std::vector<Eigen::Index> start_;
  std::vector<Eigen::Index> end_;
};

class AlignmentSolver {
 public:
  AlignmentSolver(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options)
      : dummy_(envelope(t1.root().interval, t2.root().interval)),
        a_(flatten(t1, &dummy_)),
        b_(flatten(t2, &dummy_)),
        ca_(a_),
        cb_(b_),
        options_(options) {
    const auto na = static_cast<Eigen::Index>(a_.size());
    const auto nb = static_cast<Eigen::Index>(b_.size());
    iou_.setZero(na, nb);
    value_.setConstant(na, nb, kDisallowed);
    for (std::size_t i = 1; i < a_.size(); ++i) {
      for (std::size_t j = 1; j < b_.size(); ++j) {
        if (!pair_allowed(a_, i, b_, j, options_)) continue;
        iou_(i, j) = node_iou(a_, i, b_, j);
      }
    }

    // Descendants of each node ordered by (right endpoint, left endpoint);
    // ties fall back to preorder.
    by_end_.resize(a_.size());
    for (std::size_t p = 0; p < a_.size(); ++p) {
      auto& d = by_end_[p];
      for (std::size_t k = p + 1; k < a_.last[p]; ++k) d.push_back(k);
      std::stable_sort(d.begin(), d.end(), [&](std::size_t x, std::size_t y) {
        return std::pair(ca_.end(x), ca_.start(x)) < std::pair(ca_.end(y), ca_.start(y));
      });
    }

    best_.resize(ca_.count(), cb_.count());
    ending_.resize(ca_.count(), cb_.count());
  }

  Alignment solve() {
    // Children have larger preorder ids than their ancestors, so a reverse
    // sweep sees every descendant pair before the pair that needs it.
    for (std::size_t p = a_.size(); p-- > 1;) {
      for (std::size_t q = b_.size(); q-- > 1;) {
        if (iou_(p, q) > 0.0) value_(p, q) = iou_(p, q) + best_chain(p, q, false);
      }
    }
    const double optimum = best_chain(0, 0, false);

    std::vector<AlignedPair> pairs;
    reconstruct(0, 0, pairs);
    for (auto& pair : pairs) {
      pair.node1 -= 1;
      pair.node2 -= 1;
    }
    Alignment out = finish(std::move(pairs));
    if (std::abs(out.total_weight - optimum) > 1e-9 * std::max(1.0, optimum)) {
      throw std::logic_error("alignment backtrace does not reproduce the optimum");
    }
    return out;
  }

 private:
  static constexpr double kDisallowed = -1.0;

  // Best total value of a sequence of disjoint aligned descendant pairs of
  // (p, q). Fills best_ (prefix maxima) and ending_ (best chain whose last
  // pair ends exactly at a coordinate pair) over the local endpoint ranges.
  double best_chain(std::size_t p, std::size_t q, bool trace) {
    const auto& d1 = by_end_[p];
    if (d1.empty() || b_.last[q] == q + 1) return 0.0;
    const Eigen::Index base1 = ca_.start(p);
    const Eigen::Index base2 = cb_.start(q);
    const Eigen::Index rows = ca_.end(p) - base1 + 1;
    const Eigen::Index cols = cb_.end(q) - base2 + 1;
    best_.topLeftCorner(rows, cols).setZero();
    ending_.topLeftCorner(rows, cols).setZero();
    if (trace) {
      arg1_.setConstant(rows, cols, -1);
      arg2_.setConstant(rows, cols, -1);
    }

    std::size_t k = 0;
    for (Eigen::Index x = 0; x < rows; ++x) {
      for (; k < d1.size() && ca_.end(d1[k]) - base1 == x; ++k) {
        const std::size_t u = d1[k];
        const Eigen::Index s1 = ca_.start(u) - base1;
        if (s1 >= x) continue;
        for (std::size_t v = q + 1; v < b_.last[q]; ++v) {
          const double f = value_(u, v);
          if (f == kDisallowed) continue;
          const Eigen::Index s2 = cb_.start(v) - base2;
          const Eigen::Index y = cb_.end(v) - base2;
          if (s2 >= y) continue;
          const double candidate = f + best_(s1, s2);
          if (candidate > ending_(x, y)) {
            ending_(x, y) = candidate;
            if (trace) {
              arg1_(x, y) = static_cast<int>(u);
              arg2_(x, y) = static_cast<int>(v);
            }
          }
        }
      }
      for (Eigen::Index y = 0; y < cols; ++y) {
        double m = ending_(x, y);
        if (x > 0) m = std::max(m, best_(x - 1, y));
        if (y > 0) m = std::max(m, best_(x, y - 1));
        best_(x, y) = m;
      }
    }
    return best_(rows - 1, cols - 1);
  }

  void reconstruct(std::size_t p, std::size_t q, std::vector<AlignedPair>& out) {
    if (p != 0) out.push_back({p, q, iou_(p, q)});
    if (best_chain(p, q, true) <= 0.0) return;

    std::vector<std::pair<std::size_t, std::size_t>> chain;
    const Eigen::Index base1 = ca_.start(p);
    const Eigen::Index base2 = cb_.start(q);
    Eigen::Index x = ca_.end(p) - base1;
    Eigen::Index y = cb_.end(q) - base2;
    while (x >= 0 && y >= 0 && best_(x, y) > 0.0) {
      const double here = best_(x, y);
      if (arg1_(x, y) >= 0 && ending_(x, y) == here) {
        const auto u = static_cast<std::size_t>(arg1_(x, y));
        const auto v = static_cast<std::size_t>(arg2_(x, y));
        chain.emplace_back(u, v);
        x = ca_.start(u) - base1;
        y = cb_.start(v) - base2;
      } else if (x > 0 && best_(x - 1, y) == here) {
        --x;
      } else if (y > 0 && best_(x, y - 1) == here) {
        --y;
      } else {
        throw std::logic_error("inconsistent alignment table");
      }
    }
    // The tables are reused by the recursive calls below.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) reconstruct(it->first, it->second, out);
  }

  Interval dummy_;
  FlatTree a_;
  FlatTree b_;
  Coordinates ca_;
  Coordinates cb_;
  AlignOptions options_;
  Eigen::MatrixXd iou_;
  Eigen::MatrixXd value_;  // root-aligned optimum of each subtree pair
  std::vector<std::vector<std::size_t>> by_end_;
  Eigen::MatrixXd best_;
  Eigen::MatrixXd ending_;
  Eigen::MatrixXi arg1_;
  Eigen::MatrixXi arg2_;
};

class OracleSearch {
 public:
  OracleSearch(const FlatTree& a, const FlatTree& b, const AlignOptions& options)
      : a_(a), b_(b), used_(b.size(), false), candidates_(a.size()), suffix_bound_(a.size() + 1, 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      double top = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!pair_allowed(a, i, b, j, options)) continue;
        const double w = node_iou(a, i, b, j);
        // Zero-IoU pairs never raise the objective and removing one from a
        // feasible set keeps it feasible, so they are left out.
        if (w > 0.0) {
          candidates_[i].push_back({i, j, w});
          top = std::max(top, w);
        }
      }
      suffix_bound_[i] = top;
    }
    for (std::size_t i = a.size(); i-- > 0;) suffix_bound_[i] += suffix_bound_[i + 1];
  }

  std::vector<AlignedPair> run() {
    search(0, 0.0);
    return best_pairs_;
  }

 private:
  void search(std::size_t i, double weight) {
    if (found_ && weight + suffix_bound_[i] <= best_weight_) return;
    if (i == a_.size()) {
      if (!found_ || weight > best_weight_) {
        found_ = true;
        best_weight_ = weight;
        best_pairs_ = chosen_;
      }
      return;
    }
    for (const auto& cand : candidates_[i]) {
      if (used_[cand.node2]) continue;
      const bool clash = std::any_of(chosen_.begin(), chosen_.end(), [&](const AlignedPair& c) {
        return conflicted_flat(a_, b_, c.node1, c.node2, cand.node1, cand.node2);
      });
      if (clash) continue;
      used_[cand.node2] = true;
      chosen_.push_back(cand);
      search(i + 1, weight + cand.iou);
      chosen_.pop_back();
      used_[cand.node2] = false;
    }
    search(i + 1, weight);
  }

  const FlatTree& a_;
  const FlatTree& b_;
  std::vector<bool> used_;
  std::vector<std::vector<AlignedPair>> candidates_;
  std::vector<double> suffix_bound_;
  std::vector<AlignedPair> chosen_;
  std::vector<AlignedPair> best_pairs_;
  double best_weight_ = 0.0;
  bool found_ = false;
};

}  // namespace

bool conflicted(const SegmentTree& t1, const SegmentTree& t2, const AlignedPair& x, const AlignedPair& y) {
  const FlatTree a = flatten(t1);
  const FlatTree b = flatten(t2);
  return conflicted_flat(a, b, x.node1, x.node2, y.node1, y.node2);
}

Alignment max_alignment(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options) {
  require_valid(t1);
  require_valid(t2);
  return AlignmentSolver(t1, t2, options).solve();
}

Alignment oracle_alignment(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options,
                           std::size_t max_total_nodes) {
  if (t1.node_count() + t2.node_count() > max_total_nodes) {
    throw std::invalid_argument("oracle_alignment is limited to " + std::to_string(max_total_nodes) +
                                " nodes in total, got " + std::to_string(t1.node_count() + t2.node_count()));
  }
  require_valid(t1);
  require_valid(t2);
  const FlatTree a = flatten(t1);
  const FlatTree b = flatten(t2);
  return finish(OracleSearch(a, b, options).run());
}

std::optional<std::string> alignment_defect(const SegmentTree& t1, const SegmentTree& t2, const Alignment& al,
                                            const AlignOptions& options) {
  const FlatTree a = flatten(t1);
  const FlatTree b = flatten(t2);
  std::vector<bool> used1(a.size(), false), used2(b.size(), false);
  for (const auto& p : al.pairs) {
    if (p.node1 >= a.size() || p.node2 >= b.size()) return "pair refers to a node outside the trees";
    if (used1[p.node1] || used2[p.node2]) {
      return "node aligned twice: (" + std::to_string(p.node1) + ", " + std::to_string(p.node2) + ")";
    }
    used1[p.node1] = used2[p.node2] = true;
    if (!pair_allowed(a, p.node1, b, p.node2, options)) {
      return "pair (" + std::to_string(p.node1) + ", " + std::to_string(p.node2) + ") is not permitted";
    }
    if (std::abs(node_iou(a, p.node1, b, p.node2) - p.iou) > 1e-12) {
      return "pair (" + std::to_string(p.node1) + ", " + std::to_string(p.node2) + ") carries a wrong IoU";
    }
  }
  for (std::size_t x = 0; x < al.pairs.size(); ++x) {
    for (std::size_t y = x + 1; y < al.pairs.size(); ++y) {
      const auto& p = al.pairs[x];
      const auto& q = al.pairs[y];
      if (conflicted_flat(a, b, p.node1, p.node2, q.node1, q.node2)) {
        std::ostringstream msg;
        msg << "pairs (" << p.node1 << ", " << p.node2 << ") and (" << q.node1 << ", " << q.node2
            << ") are conflicted";
        return msg.str();
      }
    }
  }
  double sum = 0.0;
  for (const auto& p : al.pairs) sum += p.iou;
  if (std::abs(sum - al.total_weight) > 1e-9) return "total_weight differs from the sum of pair IoUs";
  return std::nullopt;
}

StructIoUScore struct_iou(const SegmentTree& t1, const SegmentTree& t2, const AlignOptions& options) {
  const Alignment a = max_alignment(t1, t2, options);
  StructIoUScore s;
  s.n1 = count_nodes(t1, options.include_preterminals);
  s.n2 = count_nodes(t2, options.include_preterminals);
  s.weight = a.total_weight;
  const std::size_t total = s.n1 + s.n2;
  s.score = total == 0 ? 1.0 : 2.0 * s.weight / static_cast<double>(total);
  return s;
}

EvalReport aggregate(std::vector<SentenceScore> sentences) {
  if (sentences.empty()) throw DataError("nothing to score: the corpus is empty");
  double weighted = 0.0;
  double sizes = 0.0;
  double plain = 0.0;
  for (const auto& s : sentences) {
    const double size = static_cast<double>(s.score.n1 + s.score.n2);
    weighted += size * s.score.score;
    sizes += size;
    plain += s.score.score;
  }
  EvalReport report;
  report.sentence_mean = plain / static_cast<double>(sentences.size());
  report.corpus = sizes > 0.0 ? weighted / sizes : report.sentence_mean;
  report.sentences = std::move(sentences);
  return report;
}

EvalReport corpus_struct_iou(std::span<const TreePair> pairs, const AlignOptions& options, unsigned jobs) {
  if (pairs.empty()) throw DataError("nothing to score: the corpus is empty");
  std::vector<SentenceScore> scores(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      try {
        scores[k] = {pairs[k].id, struct_iou(pairs[k].gold, pairs[k].pred, options)};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(pairs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return aggregate(std::move(scores));
}

}  // namespace treealign
