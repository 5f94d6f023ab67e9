#ifndef TREEALIGN_SEGEVAL_HPP
#define TREEALIGN_SEGEVAL_HPP

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "treealign/interval.hpp"
#include "treealign/parseval.hpp"
#include "treealign/tree.hpp"

namespace treealign {

// Word spans of one segmentation: sorted by start and pairwise disjoint.
class SpanSet {
 public:
  SpanSet() = default;
  // Throws ValidationError if spans are unsorted or overlap.
  explicit SpanSet(std::vector<Interval> spans);

  static SpanSet from_boundaries(const BoundarySequence& b);

  const std::vector<Interval>& spans() const noexcept { return spans_; }
  std::size_t size() const noexcept { return spans_.size(); }

 private:
  std::vector<Interval> spans_;
};

inline constexpr double kDefaultBoundaryTolerance = 0.020;

// Word-boundary precision/recall/F1 over internal boundaries (the utterance
// start and end are given, not predicted). A hypothesis boundary matches at
// most one reference boundary within `tolerance`; the greedy sweep over both
// sorted lists yields a maximum matching. `gold` counts reference
// boundaries, `pred` hypothesis boundaries.
Prf boundary_prf(const BoundarySequence& ref, const BoundarySequence& hyp,
                 double tolerance = kDefaultBoundaryTolerance);

// Same, on raw sorted boundary positions.
Prf boundary_prf(std::span<const double> ref, std::span<const double> hyp,
                 double tolerance = kDefaultBoundaryTolerance);

enum class MiouMode {
  strict,        // matched IoU sum / max(|s1|, |s2|)
  matched_only,  // mean over matched pairs with positive IoU
};

// Mean IoU under a maximum-weight one-to-one matching of the spans.
double segment_miou(const SpanSet& s1, const SpanSet& s2, MiouMode mode = MiouMode::strict);

enum class MbrLoss { miou, tree_f1 };

using MbrCandidate = std::variant<SpanSet, ParseNode>;

struct MbrOptions {
  MiouMode miou_mode = MiouMode::strict;
  BracketOptions brackets{.labeled = false};
};

// loss(a, b): -mIoU for span sets, 1 - F1 for parses.
double mbr_loss(const MbrCandidate& a, const MbrCandidate& b, MbrLoss loss, const MbrOptions& options = {});

// Summed loss of each candidate against all candidates (itself included).
// Each unordered pair is evaluated once, so the risk matrix is symmetric.
std::vector<double> mbr_risks(std::span<const MbrCandidate> candidates, MbrLoss loss,
                              const MbrOptions& options = {});

// Index of the minimum-risk candidate, lowest index on ties. Throws
// std::invalid_argument on an empty list, or when candidate kinds are mixed
// or do not fit the loss.
std::size_t mbr_select(std::span<const MbrCandidate> candidates, MbrLoss loss, const MbrOptions& options = {});

}  // namespace treealign

#endif  // TREEALIGN_SEGEVAL_HPP
