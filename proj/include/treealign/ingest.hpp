#ifndef TREEALIGN_INGEST_HPP
#define TREEALIGN_INGEST_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "treealign/align.hpp"
#include "treealign/bracket.hpp"
#include "treealign/segeval.hpp"
#include "treealign/tree.hpp"

namespace treealign {

using Json = nlohmann::json;

// ---- time trees: {"label": s, "start": x, "end": y, "children": [...]} ----

// Throws ParseError on a malformed node object.
SegmentTree tree_from_json(const Json& j, Unit unit = Unit::seconds);
Json tree_to_json(const SegmentTree& tree);
Json node_to_json(const SegmentNode& node);

struct TreeRecord {
  std::optional<std::string> id;
  SegmentTree tree;
  std::size_t line = 0;  // 1-based source line
};

// One record per non-blank line. A line is either a node object, optionally
// with an "id" member, or {"id": ..., "tree": {node}}.
std::vector<TreeRecord> read_time_trees(const std::filesystem::path& path);
void write_time_trees(const std::filesystem::path& path, const std::vector<TreeRecord>& records);
std::string format_time_tree(const TreeRecord& record);

// ---- bracketed parses, one per non-blank line ----

struct ParseRecord {
  ParseNode parse;
  std::size_t line = 0;
};

std::vector<ParseRecord> read_bracketed(const std::filesystem::path& path, const BracketReadOptions& options = {});

// ---- word boundaries ----

struct Utterance {
  std::optional<std::string> id;
  std::vector<WordSpan> words;
};

// JSONL (one utterance per line: [{"word", "start", "end"}, ...] or
// {"id": ..., "words": [...]}) or whitespace text "word start end" with blank
// lines between utterances. The format is detected from the first
// non-blank character.
std::vector<Utterance> read_word_spans(const std::filesystem::path& path);
Json boundaries_to_json(const BoundarySequence& b);

// ---- corpus loading ----

enum class TreeFormat { automatic, json, bracketed };

struct LoadOptions {
  TreeFormat format = TreeFormat::automatic;
  Granularity granularity = Granularity::word;  // for bracketed input
  BracketReadOptions brackets;
  bool skip_invalid = false;
};

struct LoadedCorpus {
  std::vector<TreePair> pairs;
  std::vector<std::string> warnings;
};

TreeFormat detect_tree_format(const std::filesystem::path& path);

// Trees of either format, validated unless `validate` is false.
std::vector<TreeRecord> read_trees(const std::filesystem::path& path, const LoadOptions& options,
                                   bool validate = true);

// Pairs gold and predicted records by line order, or by "id" when every
// record in both files carries one. Throws DataError on count mismatch,
// unmatched ids, or invalid trees (unless skip_invalid, which drops the pair
// and records a warning). Pairs whose root envelopes differ by more than 10%
// are kept with a warning.
LoadedCorpus load_corpus(const std::filesystem::path& gold, const std::filesystem::path& pred,
                         const LoadOptions& options = {});

// ---- reports ----

Json report_to_json(const EvalReport& report, const Json& config = Json::object());
void write_report(const EvalReport& report, const std::filesystem::path& path, const Json& config = Json::object());

Json alignment_to_json(const SegmentTree& t1, const SegmentTree& t2, const Alignment& alignment,
                       const StructIoUScore& score);

Json prf_to_json(const Prf& prf);

// Reads all non-blank lines; throws DataError if the file cannot be opened.
std::vector<std::pair<std::size_t, std::string>> read_lines(const std::filesystem::path& path);

// Writes `text` to `path`; throws std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace treealign

#endif  // TREEALIGN_INGEST_HPP
