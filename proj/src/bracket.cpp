#include "treealign/bracket.hpp"

#include <algorithm>
#include <cctype>

#include "treealign/error.hpp"

namespace treealign {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  ParseNode read_tree() {
    skip_space();
    if (at_end()) throw ParseError("empty parse string", pos_);
    ParseNode root = read_node();
    skip_space();
    if (!at_end()) throw ParseError("unexpected trailing input after tree", pos_);
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_token() {
    const std::size_t begin = pos_;
    while (!at_end()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    return std::string(text_.substr(begin, pos_ - begin));
  }

  ParseNode read_node() {
    const std::size_t open = pos_;
    if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
    ++pos_;
    skip_space();
    ParseNode node;
    if (!at_end() && text_[pos_] != '(' && text_[pos_] != ')') node.label = read_token();

    std::vector<std::string> tokens;
    std::size_t token_pos = 0;
    while (true) {
      skip_space();
      if (at_end()) throw ParseError("unbalanced bracket opened here", open);
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(read_node());
      } else {
        if (tokens.empty()) token_pos = pos_;
        tokens.push_back(read_token());
      }
    }

    if (!tokens.empty()) {
      if (!node.children.empty() || tokens.size() > 1) {
        throw ParseError("terminal '" + tokens.front() + "' is not directly under a preterminal", token_pos);
      }
      node.word = std::move(tokens.front());
    } else if (node.children.empty()) {
      throw ParseError("constituent has neither children nor a word", open);
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string strip_tag(const std::string& label) {
  if (label.empty() || label.front() == '-') return label;
  const auto cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

void strip_tags(ParseNode& node) {
  node.label = strip_tag(node.label);
  for (auto& child : node.children) strip_tags(child);
}

// Returns false when the node should be dropped entirely.
bool remove_ignored(ParseNode& node, const std::vector<std::string>& ignore) {
  if (node.is_preterminal()) {
    return std::find(ignore.begin(), ignore.end(), *node.word) == ignore.end();
  }
  std::erase_if(node.children, [&](ParseNode& child) { return !remove_ignored(child, ignore); });
  return !node.children.empty();
}

void collect_words(const ParseNode& node, std::vector<std::string>& out) {
  if (node.is_preterminal()) {
    out.push_back(*node.word);
    return;
  }
  for (const auto& child : node.children) collect_words(child, out);
}

void write(const ParseNode& node, std::string& out) {
  out += '(';
  out += node.label;
  if (node.is_preterminal()) {
    out += ' ';
    out += *node.word;
  }
  for (const auto& child : node.children) {
    out += ' ';
    write(child, out);
  }
  out += ')';
}

}  // namespace

ParseNode parse_bracketed(std::string_view text, const BracketReadOptions& options) {
  ParseNode root = Reader(text).read_tree();
  if (options.unwrap_empty_root) {
    while (root.label.empty() && !root.is_preterminal() && root.children.size() == 1) {
      ParseNode inner = std::move(root.children.front());
      root = std::move(inner);
    }
  }
  if (options.strip_function_tags) strip_tags(root);
  if (!options.ignore_tokens.empty() && !remove_ignored(root, options.ignore_tokens)) {
    throw ParseError("every token of the parse is in the ignore list");
  }
  return root;
}

std::string to_bracketed(const ParseNode& node) {
  std::string out;
  write(node, out);
  return out;
}

std::vector<std::string> leaf_words(const ParseNode& node) {
  std::vector<std::string> out;
  collect_words(node, out);
  return out;
}

}  // namespace treealign
