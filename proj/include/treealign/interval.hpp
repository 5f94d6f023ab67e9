#ifndef TREEALIGN_INTERVAL_HPP
#define TREEALIGN_INTERVAL_HPP

#include <iosfwd>

namespace treealign {

// Absolute tolerance used for every coordinate comparison. Defaults to 1e-9;
// the CLI overrides it from TREEALIGN_EPSILON.
double coordinate_epsilon() noexcept;
void set_coordinate_epsilon(double eps);

// Epsilon-aware coordinate comparisons.
bool coord_equal(double a, double b) noexcept;
bool coord_less(double a, double b) noexcept;  // a < b by more than epsilon

// A real-valued open interval (start, end) with start < end.
class Interval {
 public:
  // Throws std::invalid_argument unless start < end (epsilon-aware) and both
  // are finite.
  Interval(double start, double end);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }

  // Equal endpoints within the coordinate epsilon.
  friend bool operator==(const Interval& a, const Interval& b) noexcept {
    return coord_equal(a.start_, b.start_) && coord_equal(a.end_, b.end_);
  }

 private:
  double start_;
  double end_;
};

std::ostream& operator<<(std::ostream& os, const Interval& i);

inline double length(const Interval& i) noexcept { return i.end() - i.start(); }

// |i1 ∩ i2| for open intervals; 0 when disjoint or touching at a point.
double intersection_size(const Interval& i1, const Interval& i2) noexcept;

// |i1| + |i2| - intersection_size(i1, i2).
double union_size(const Interval& i1, const Interval& i2) noexcept;

// intersection_size / union_size, in [0, 1]. Bitwise symmetric in its
// arguments.
double iou(const Interval& i1, const Interval& i2) noexcept;

// The smallest interval containing both.
Interval envelope(const Interval& i1, const Interval& i2);

}  // namespace treealign

#endif  // TREEALIGN_INTERVAL_HPP
