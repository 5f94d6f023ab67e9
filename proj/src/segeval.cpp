#include "treealign/segeval.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "treealign/assignment.hpp"
#include "treealign/error.hpp"

namespace treealign {

SpanSet::SpanSet(std::vector<Interval> spans) : spans_(std::move(spans)) {
  for (std::size_t i = 1; i < spans_.size(); ++i) {
    if (coord_less(spans_[i].start(), spans_[i - 1].end())) {
      throw ValidationError("span " + std::to_string(i) + " starts before span " + std::to_string(i - 1) +
                            " ends; spans must be sorted and disjoint");
    }
  }
}

SpanSet SpanSet::from_boundaries(const BoundarySequence& b) {
  std::vector<Interval> spans;
  spans.reserve(b.word_count());
  for (std::size_t i = 0; i < b.word_count(); ++i) spans.push_back(b.word_span(i));
  return SpanSet(std::move(spans));
}

Prf boundary_prf(std::span<const double> ref, std::span<const double> hyp, double tolerance) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("boundary tolerance must be non-negative");
  const double reach = tolerance + coordinate_epsilon();
  std::size_t matched = 0;
  std::size_t i = 0, j = 0;
  while (i < ref.size() && j < hyp.size()) {
    if (hyp[j] < ref[i] - reach) {
      ++j;
    } else if (ref[i] < hyp[j] - reach) {
      ++i;
    } else {
      ++matched;
      ++i;
      ++j;
    }
  }
  return make_prf(matched, ref.size(), hyp.size());
}

Prf boundary_prf(const BoundarySequence& ref, const BoundarySequence& hyp, double tolerance) {
  const auto& r = ref.boundaries();
  const auto& h = hyp.boundaries();
  return boundary_prf(std::span<const double>(r).subspan(1, r.size() - 2),
                      std::span<const double>(h).subspan(1, h.size() - 2), tolerance);
}

double segment_miou(const SpanSet& s1, const SpanSet& s2, MiouMode mode) {
  const auto n1 = static_cast<Eigen::Index>(s1.size());
  const auto n2 = static_cast<Eigen::Index>(s2.size());
  if (n1 == 0 && n2 == 0) return 1.0;
  Eigen::MatrixXd w(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) w(i, j) = iou(s1.spans()[i], s2.spans()[j]);
  }
  const auto match = max_weight_assignment(w);
  std::vector<double> values;
  for (Eigen::Index i = 0; i < n1; ++i) {
    const Eigen::Index j = match[static_cast<std::size_t>(i)];
    if (j >= 0 && w(i, j) > 0.0) values.push_back(w(i, j));
  }
  std::sort(values.begin(), values.end());
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (mode == MiouMode::matched_only) {
    return values.empty() ? 0.0 : total / static_cast<double>(values.size());
  }
  return total / static_cast<double>(std::max(n1, n2));
}

double mbr_loss(const MbrCandidate& a, const MbrCandidate& b, MbrLoss loss, const MbrOptions& options) {
  if (loss == MbrLoss::miou) {
    const auto* x = std::get_if<SpanSet>(&a);
    const auto* y = std::get_if<SpanSet>(&b);
    if (!x || !y) throw std::invalid_argument("the mIoU loss needs span-set candidates");
    return -segment_miou(*x, *y, options.miou_mode);
  }
  const auto* x = std::get_if<ParseNode>(&a);
  const auto* y = std::get_if<ParseNode>(&b);
  if (!x || !y) throw std::invalid_argument("the tree F1 loss needs parse-tree candidates");
  return 1.0 - score_pair(extract_brackets(*x, options.brackets), extract_brackets(*y, options.brackets)).f1;
}

std::vector<double> mbr_risks(std::span<const MbrCandidate> candidates, MbrLoss loss, const MbrOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("MBR selection needs at least one candidate");
  const std::size_t kind = candidates.front().index();
  for (const auto& c : candidates) {
    if (c.index() != kind) throw std::invalid_argument("MBR candidates mix span sets and parse trees");
  }
  const auto n = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      table(i, j) = table(j, i) = mbr_loss(candidates[i], candidates[j], loss, options);
    }
  }
  std::vector<double> risks(candidates.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) risks[i] += table(i, j);
  }
  return risks;
}

std::size_t mbr_select(std::span<const MbrCandidate> candidates, MbrLoss loss, const MbrOptions& options) {
  const auto risks = mbr_risks(candidates, loss, options);
  return static_cast<std::size_t>(std::min_element(risks.begin(), risks.end()) - risks.begin());
}

}  // namespace treealign
