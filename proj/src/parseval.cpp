#include "treealign/parseval.hpp"

#include <algorithm>

#include "treealign/error.hpp"

namespace treealign {

namespace {

// Returns the number of words under `node`.
int collect(const ParseNode& node, int first_word, bool is_root, const BracketOptions& options,
            std::vector<Bracket>& out) {
  if (node.is_preterminal()) {
    if (options.include_preterminals && (!is_root || options.include_root)) {
      out.push_back({options.labeled ? node.label : std::string(), first_word, first_word});
    }
    return 1;
  }
  int words = 0;
  for (const auto& child : node.children) words += collect(child, first_word + words, false, options, out);
  if (!is_root || options.include_root) {
    out.push_back({options.labeled ? node.label : std::string(), first_word, first_word + words - 1});
  }
  return words;
}

}  // namespace

BracketSet extract_brackets(const ParseNode& parse, const BracketOptions& options) {
  BracketSet set;
  collect(parse, 1, true, options, set.brackets);
  std::sort(set.brackets.begin(), set.brackets.end());
  return set;
}

Prf make_prf(std::size_t matched, std::size_t gold, std::size_t pred) {
  Prf r;
  r.matched = matched;
  r.gold = gold;
  r.pred = pred;
  if (gold == 0 && pred == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = pred ? static_cast<double>(matched) / static_cast<double>(pred) : 0.0;
  r.recall = gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

Prf score_pair(const BracketSet& gold, const BracketSet& pred) {
  std::size_t matched = 0;
  auto g = gold.brackets.begin();
  auto p = pred.brackets.begin();
  while (g != gold.brackets.end() && p != pred.brackets.end()) {
    if (*g < *p) {
      ++g;
    } else if (*p < *g) {
      ++p;
    } else {
      ++matched;
      ++g;
      ++p;
    }
  }
  return make_prf(matched, gold.size(), pred.size());
}

CorpusPrf score_corpus(std::span<const BracketSetPair> pairs) {
  if (pairs.empty()) throw DataError("nothing to score: the corpus is empty");
  CorpusPrf out;
  std::size_t matched = 0, gold = 0, pred = 0;
  for (const auto& pair : pairs) {
    Prf s = score_pair(pair.gold, pair.pred);
    matched += s.matched;
    gold += s.gold;
    pred += s.pred;
    out.macro_precision += s.precision;
    out.macro_recall += s.recall;
    out.macro_f1 += s.f1;
    out.sentences.push_back(s);
  }
  const auto n = static_cast<double>(pairs.size());
  out.macro_precision /= n;
  out.macro_recall /= n;
  out.macro_f1 /= n;
  out.micro = make_prf(matched, gold, pred);
  return out;
}

}  // namespace treealign
