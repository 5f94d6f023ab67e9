#ifndef TREEALIGN_BRACKET_HPP
#define TREEALIGN_BRACKET_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treealign {

// A node of a discrete (text) constituency parse. Preterminals carry the
// lexical item in `word` and have no children; terminals are not nodes.
struct ParseNode {
  std::string label;
  std::vector<ParseNode> children;
  std::optional<std::string> word;

  bool is_preterminal() const noexcept { return word.has_value(); }
};

struct BracketReadOptions {
  // Strip PTB function tags: "NP-SBJ-1" -> "NP", "NP=2" -> "NP". Labels that
  // start with '-' (e.g. "-NONE-", "-LRB-") are left alone.
  bool strip_function_tags = false;
  // Unwrap a nameless outermost bracket with a single child, as in
  // "( (S ...) )".
  bool unwrap_empty_root = true;
  // Preterminals whose word is listed here are removed, along with any
  // constituent that becomes empty.
  std::vector<std::string> ignore_tokens;
};

// Parses one s-expression. Throws ParseError (with character offset) on
// unbalanced brackets, stray terminals, or trailing input.
ParseNode parse_bracketed(std::string_view text, const BracketReadOptions& options = {});

std::string to_bracketed(const ParseNode& node);

// Leaf words, left to right.
std::vector<std::string> leaf_words(const ParseNode& node);

}  // namespace treealign

#endif  // TREEALIGN_BRACKET_HPP
