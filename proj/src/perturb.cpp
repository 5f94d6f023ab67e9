#include "treealign/perturb.hpp"

#include <functional>

namespace treealign {

std::string_view to_string(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::noise:
      return "noise";
    case PerturbKind::insert:
      return "insert";
    case PerturbKind::del:
      return "delete";
  }
  return "unknown";
}

PerturbKind parse_perturb_kind(std::string_view name) {
  if (name == "noise") return PerturbKind::noise;
  if (name == "insert") return PerturbKind::insert;
  if (name == "delete") return PerturbKind::del;
  throw std::invalid_argument("unknown perturbation kind '" + std::string(name) + "'");
}

namespace detail {

namespace {

// Appends the replacement(s) for `node` to `out`.
void rebuild(const SegmentNode& node, double delta, const std::function<double(double, double)>& draw,
             std::vector<SegmentNode>& out) {
  if (node.is_leaf()) {
    const double r = draw(0.0, 1.0);
    if (r < delta) {
      const double cut = draw(node.interval.start(), node.interval.end());
      if (coord_less(node.interval.start(), cut) && coord_less(cut, node.interval.end())) {
        out.push_back({node.label, Interval(node.interval.start(), cut), {}});
        out.push_back({node.label, Interval(cut, node.interval.end()), {}});
        return;
      }
    }
    out.push_back(node);
    return;
  }
  SegmentNode copy{node.label, node.interval, {}};
  for (const auto& child : node.children) rebuild(child, delta, draw, copy.children);
  out.push_back(std::move(copy));
}

}  // namespace

SegmentNode split_leaves(const SegmentNode& node, double delta, const std::function<double(double, double)>& draw) {
  std::vector<SegmentNode> out;
  rebuild(node, delta, draw, out);
  if (out.size() == 1) return std::move(out.front());
  return SegmentNode{node.label, node.interval, std::move(out)};
}

}  // namespace detail

}  // namespace treealign
