#include "treealign/interval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace treealign {

namespace {
std::atomic<double> g_epsilon{1e-9};
}

double coordinate_epsilon() noexcept { return g_epsilon.load(std::memory_order_relaxed); }

void set_coordinate_epsilon(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("coordinate epsilon must be a finite non-negative number");
  }
  g_epsilon.store(eps, std::memory_order_relaxed);
}

bool coord_equal(double a, double b) noexcept { return std::abs(a - b) <= coordinate_epsilon(); }

bool coord_less(double a, double b) noexcept { return b - a > coordinate_epsilon(); }

Interval::Interval(double start, double end) : start_(start), end_(end) {
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw std::invalid_argument("interval endpoints must be finite");
  }
  if (!coord_less(start, end)) {
    throw std::invalid_argument("interval (" + std::to_string(start) + ", " + std::to_string(end) +
                                ") must satisfy start < end");
  }
}

std::ostream& operator<<(std::ostream& os, const Interval& i) {
  return os << '(' << i.start() << ", " << i.end() << ')';
}

double intersection_size(const Interval& i1, const Interval& i2) noexcept {
  const double overlap = std::min(i1.end(), i2.end()) - std::max(i1.start(), i2.start());
  return overlap > coordinate_epsilon() ? overlap : 0.0;
}

double union_size(const Interval& i1, const Interval& i2) noexcept {
  return length(i1) + length(i2) - intersection_size(i1, i2);
}

double iou(const Interval& i1, const Interval& i2) noexcept {
  const double inter = intersection_size(i1, i2);
  if (inter == 0.0) return 0.0;
  if (i1 == i2) return 1.0;
  return inter / (length(i1) + length(i2) - inter);
}

Interval envelope(const Interval& i1, const Interval& i2) {
  return Interval(std::min(i1.start(), i2.start()), std::max(i1.end(), i2.end()));
}

}  // namespace treealign
