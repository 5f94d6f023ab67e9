#ifndef TREEALIGN_PARSEVAL_HPP
#define TREEALIGN_PARSEVAL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "treealign/bracket.hpp"

namespace treealign {

// A constituent as a 1-based inclusive word span [left, right].
struct Bracket {
  std::string label;
  int left;
  int right;

  friend auto operator<=>(const Bracket&, const Bracket&) = default;
};

// Multiset of brackets, kept sorted.
struct BracketSet {
  std::vector<Bracket> brackets;
  std::size_t size() const noexcept { return brackets.size(); }
};

struct BracketOptions {
  bool labeled = true;
  bool include_preterminals = false;
  bool include_root = true;
};

BracketSet extract_brackets(const ParseNode& parse, const BracketOptions& options = {});

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t pred = 0;
};

// Precision/recall/F1 from counts. Both sides empty scores (1, 1, 1); one
// side empty scores zero on that side.
Prf make_prf(std::size_t matched, std::size_t gold, std::size_t pred);

Prf score_pair(const BracketSet& gold, const BracketSet& pred);

struct CorpusPrf {
  Prf micro;              // counts pooled over the corpus
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;  // mean of sentence scores
  std::vector<Prf> sentences;
};

struct BracketSetPair {
  BracketSet gold;
  BracketSet pred;
};

// Throws DataError on an empty corpus.
CorpusPrf score_corpus(std::span<const BracketSetPair> pairs);

}  // namespace treealign

#endif  // TREEALIGN_PARSEVAL_HPP
