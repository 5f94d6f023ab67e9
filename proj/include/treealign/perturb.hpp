#ifndef TREEALIGN_PERTURB_HPP
#define TREEALIGN_PERTURB_HPP

#include <cmath>
#include <concepts>
#include <functional>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "treealign/tree.hpp"

namespace treealign {

// Deterministic random stream shared by all perturbations.
//
// The engine is std::mt19937_64 seeded with splitmix64(seed). A uniform draw
// on [lo, hi) is lo + (hi - lo) * ((x >> 11) * 2^-53) for the next engine
// output x. Per-utterance streams use derive_seed(corpus_seed, index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  static std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive_seed(std::uint64_t corpus_seed, std::uint64_t index) noexcept {
    return splitmix64(corpus_seed ^ splitmix64(index));
  }

 private:
  std::mt19937_64 engine_;
};

// Anything that can draw from U(lo, hi); tests substitute scripted sources.
template <typename S>
concept UniformSource = requires(S& s, double lo, double hi) {
  { s.uniform(lo, hi) } -> std::convertible_to<double>;
};

enum class PerturbKind { noise, insert, del };

std::string_view to_string(PerturbKind kind);
PerturbKind parse_perturb_kind(std::string_view name);

struct PerturbSpec {
  PerturbKind kind = PerturbKind::noise;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {
inline void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("perturbation level must lie in [0, 1]");
}
SegmentNode split_leaves(const SegmentNode& node, double delta, const std::function<double(double, double)>& draw);
}  // namespace detail

// Noise: for i = 1 .. n-1 in order, draw r ~ U(-delta, delta) and move b_i a
// fraction |r| of the way toward b_{i-1} (r < 0) or b_{i+1} (r >= 0), using
// the neighbours' current values. End points never move.
template <UniformSource Source>
BoundarySequence perturb_noise(const BoundarySequence& b, double delta, Source& source) {
  detail::check_delta(delta);
  std::vector<double> bounds = b.boundaries();
  for (std::size_t i = 1; i + 1 < bounds.size(); ++i) {
    const double r = source.uniform(-delta, delta);
    const double target = r >= 0.0 ? bounds[i + 1] : bounds[i - 1];
    bounds[i] = bounds[i] + std::abs(r) * (target - bounds[i]);
  }
  return BoundarySequence(b.words(), std::move(bounds));
}

// Insert: for each leaf in order draw r ~ U(0, 1); when r < delta draw
// b' ~ U(start, end) and replace the leaf by two same-label siblings
// (start, b') and (b', end). A draw that lands on an end point is skipped. A
// single-leaf tree gains a root with the two halves as children.
template <UniformSource Source>
SegmentTree perturb_insert(const SegmentTree& tree, double delta, Source& source) {
  detail::check_delta(delta);
  std::function<double(double, double)> draw = [&](double lo, double hi) { return source.uniform(lo, hi); };
  return SegmentTree(detail::split_leaves(tree.root(), delta, draw), tree.unit());
}

// Delete: for i = 1 .. n-1 draw r ~ U(0, 1) and drop b_i when r < delta.
// Words on both sides of a dropped boundary are joined with `separator`.
template <UniformSource Source>
BoundarySequence perturb_delete(const BoundarySequence& b, double delta, Source& source,
                                std::string_view separator = " ") {
  detail::check_delta(delta);
  std::vector<std::string> words{b.words().front()};
  std::vector<double> bounds{b.boundaries().front()};
  for (std::size_t i = 1; i < b.word_count(); ++i) {
    const double r = source.uniform(0.0, 1.0);
    if (r < delta) {
      words.back().append(separator).append(b.words()[i]);
    } else {
      bounds.push_back(b.boundaries()[i]);
      words.push_back(b.words()[i]);
    }
  }
  bounds.push_back(b.boundaries().back());
  return BoundarySequence(std::move(words), std::move(bounds));
}

}  // namespace treealign

#endif  // TREEALIGN_PERTURB_HPP
