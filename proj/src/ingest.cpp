#include "treealign/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "treealign/error.hpp"

#ifndef TREEALIGN_VERSION
#define TREEALIGN_VERSION "unknown"
#endif

namespace treealign {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

SegmentNode node_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("tree node must be a JSON object");
  if (!j.contains("start") || !j["start"].is_number() || !j.contains("end") || !j["end"].is_number()) {
    throw ParseError("tree node needs numeric \"start\" and \"end\"");
  }
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("\"label\" must be a string");
    label = j["label"].get<std::string>();
  }
  std::vector<SegmentNode> children;
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw ParseError("\"children\" must be an array");
    for (const auto& c : j["children"]) children.push_back(node_from_json(c));
  }
  try {
    return SegmentNode{std::move(label), Interval(j["start"].get<double>(), j["end"].get<double>()),
                       std::move(children)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::optional<std::string> id_of(const Json& j) {
  if (!j.is_object() || !j.contains("id")) return std::nullopt;
  const auto& id = j["id"];
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw ParseError("\"id\" must be a string or an integer");
}

std::optional<char> first_significant_char(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  char c;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) return c;
  }
  return std::nullopt;
}

WordSpan span_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("word") || !j["word"].is_string() || !j.contains("start") ||
      !j["start"].is_number() || !j.contains("end") || !j["end"].is_number()) {
    throw ParseError("word entry needs \"word\" (string), \"start\" and \"end\" (numbers)");
  }
  return {j["word"].get<std::string>(), j["start"].get<double>(), j["end"].get<double>()};
}

bool all_have_ids(const std::vector<TreeRecord>& records) {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(), [](const TreeRecord& r) { return r.id.has_value(); });
}

void check_unique_ids(const std::vector<TreeRecord>& records, const std::filesystem::path& path) {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(*r.id).second) throw DataError(where(path, r.line) + ": duplicate id '" + *r.id + "'");
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::string>> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    out.emplace_back(number, line);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SegmentTree tree_from_json(const Json& j, Unit unit) { return SegmentTree(node_from_json(j), unit); }

Json node_to_json(const SegmentNode& node) {
  Json j = {{"label", node.label}, {"start", node.interval.start()}, {"end", node.interval.end()}};
  Json children = Json::array();
  for (const auto& c : node.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  return j;
}

Json tree_to_json(const SegmentTree& tree) { return node_to_json(tree.root()); }

std::vector<TreeRecord> read_time_trees(const std::filesystem::path& path) {
  std::vector<TreeRecord> out;
  for (const auto& [number, text] : read_lines(path)) {
    try {
      const Json j = Json::parse(text);
      auto id = id_of(j);
      const Json& node = j.is_object() && j.contains("tree") ? j["tree"] : j;
      out.push_back({std::move(id), tree_from_json(node), number});
    } catch (const Json::exception& e) {
      throw ParseError(where(path, number) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where(path, number) + ": " + e.what());
    }
  }
  return out;
}

std::string format_time_tree(const TreeRecord& record) {
  Json j = tree_to_json(record.tree);
  if (record.id) j["id"] = *record.id;
  return j.dump();
}

void write_time_trees(const std::filesystem::path& path, const std::vector<TreeRecord>& records) {
  std::string text;
  for (const auto& r : records) text += format_time_tree(r) + "\n";
  write_text(path, text);
}

std::vector<ParseRecord> read_bracketed(const std::filesystem::path& path, const BracketReadOptions& options) {
  std::vector<ParseRecord> out;
  for (const auto& [number, text] : read_lines(path)) {
    try {
      out.push_back({parse_bracketed(text, options), number});
    } catch (const ParseError& e) {
      throw ParseError(where(path, number) + ": " + e.what() + " (offset " + std::to_string(e.offset()) + ")",
                       e.offset());
    }
  }
  return out;
}

std::vector<Utterance> read_word_spans(const std::filesystem::path& path) {
  const auto first = first_significant_char(path);
  std::vector<Utterance> out;
  if (!first) return out;
  if (*first == '[' || *first == '{') {
    for (const auto& [number, text] : read_lines(path)) {
      try {
        const Json j = Json::parse(text);
        Utterance u;
        u.id = id_of(j);
        const Json& words = j.is_object() ? j.at("words") : j;
        if (!words.is_array()) throw ParseError("utterance must be an array of word entries");
        for (const auto& w : words) u.words.push_back(span_from_json(w));
        out.push_back(std::move(u));
      } catch (const Json::exception& e) {
        throw ParseError(where(path, number) + ": " + e.what());
      } catch (const ParseError& e) {
        throw ParseError(where(path, number) + ": " + e.what());
      }
    }
    return out;
  }

  std::ifstream in(path);
  std::string line;
  std::size_t number = 0;
  Utterance current;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) {
      if (!current.words.empty()) out.push_back(std::exchange(current, {}));
      continue;
    }
    WordSpan span{word, 0.0, 0.0};
    std::string extra;
    if (!(fields >> span.start >> span.end) || (fields >> extra)) {
      throw ParseError(where(path, number) + ": expected three columns 'word start end'");
    }
    current.words.push_back(std::move(span));
  }
  if (!current.words.empty()) out.push_back(std::move(current));
  return out;
}

Json boundaries_to_json(const BoundarySequence& b) {
  Json words = Json::array();
  for (const auto& w : word_spans(b)) words.push_back({{"word", w.word}, {"start", w.start}, {"end", w.end}});
  return words;
}

TreeFormat detect_tree_format(const std::filesystem::path& path) {
  const auto c = first_significant_char(path);
  if (!c) throw DataError(path.string() + " is empty");
  if (*c == '{') return TreeFormat::json;
  if (*c == '(') return TreeFormat::bracketed;
  throw DataError("cannot tell the tree format of " + path.string() + " (expected '{' or '(')");
}

std::vector<TreeRecord> read_trees(const std::filesystem::path& path, const LoadOptions& options, bool validate) {
  const TreeFormat format = options.format == TreeFormat::automatic ? detect_tree_format(path) : options.format;
  std::vector<TreeRecord> records;
  if (format == TreeFormat::json) {
    records = read_time_trees(path);
  } else {
    for (auto& p : read_bracketed(path, options.brackets)) {
      records.push_back({std::nullopt, project_text(p.parse, options.granularity), p.line});
    }
  }
  if (validate) {
    for (const auto& r : records) {
      const auto violations = treealign::validate(r.tree);
      if (!violations.empty()) {
        throw DataError(where(path, r.line) + ": " + std::string(to_string(violations.front().condition)) + ": " +
                        violations.front().message);
      }
    }
  }
  return records;
}

LoadedCorpus load_corpus(const std::filesystem::path& gold_path, const std::filesystem::path& pred_path,
                         const LoadOptions& options) {
  auto gold = read_trees(gold_path, options, false);
  auto pred = read_trees(pred_path, options, false);

  std::vector<std::pair<std::size_t, std::size_t>> index;  // (gold, pred)
  LoadedCorpus out;
  if (all_have_ids(gold) && all_have_ids(pred)) {
    check_unique_ids(gold, gold_path);
    check_unique_ids(pred, pred_path);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t k = 0; k < pred.size(); ++k) by_id.emplace(*pred[k].id, k);
    for (std::size_t k = 0; k < gold.size(); ++k) {
      auto it = by_id.find(*gold[k].id);
      if (it == by_id.end()) {
        throw DataError(where(gold_path, gold[k].line) + ": id '" + *gold[k].id + "' has no predicted tree");
      }
      index.emplace_back(k, it->second);
      by_id.erase(it);
    }
    for (const auto& [id, k] : by_id) {
      out.warnings.push_back(where(pred_path, pred[k].line) + ": id '" + id + "' has no gold tree; ignored");
    }
  } else {
    if (gold.size() != pred.size()) {
      throw DataError("gold has " + std::to_string(gold.size()) + " trees but pred has " +
                      std::to_string(pred.size()) + " and records carry no ids");
    }
    for (std::size_t k = 0; k < gold.size(); ++k) index.emplace_back(k, k);
  }

  for (const auto& [g, p] : index) {
    bool ok = true;
    for (const auto& [record, path] : {std::pair{&gold[g], &gold_path}, std::pair{&pred[p], &pred_path}}) {
      const auto violations = validate(record->tree);
      if (violations.empty()) continue;
      const std::string msg = where(*path, record->line) + ": " +
                              std::string(to_string(violations.front().condition)) + ": " +
                              violations.front().message;
      if (!options.skip_invalid) throw DataError(msg);
      out.warnings.push_back(msg + " (pair skipped)");
      ok = false;
    }
    if (!ok) continue;
    const std::string id = gold[g].id ? *gold[g].id : std::to_string(g);
    if (iou(gold[g].tree.root().interval, pred[p].tree.root().interval) < 0.9) {
      out.warnings.push_back("pair '" + id + "': gold and predicted trees cover noticeably different ranges");
    }
    out.pairs.push_back({id, gold[g].tree, pred[p].tree});
  }
  return out;
}

Json prf_to_json(const Prf& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1},
          {"matched", prf.matched},     {"gold", prf.gold},     {"pred", prf.pred}};
}

Json report_to_json(const EvalReport& report, const Json& config) {
  Json sentences = Json::array();
  for (const auto& s : report.sentences) {
    sentences.push_back({{"id", s.id},
                         {"score", s.score.score},
                         {"n1", s.score.n1},
                         {"n2", s.score.n2},
                         {"weight", s.score.weight}});
  }
  return {{"corpus", report.corpus},
          {"sentence_mean", report.sentence_mean},
          {"sentences", std::move(sentences)},
          {"version", TREEALIGN_VERSION},
          {"config", config}};
}

void write_report(const EvalReport& report, const std::filesystem::path& path, const Json& config) {
  if (report.sentences.empty()) throw DataError("nothing to report: the corpus is empty");
  write_text(path, report_to_json(report, config).dump(2) + "\n");
}

Json alignment_to_json(const SegmentTree& t1, const SegmentTree& t2, const Alignment& alignment,
                       const StructIoUScore& score) {
  const auto paths1 = preorder_paths(t1);
  const auto paths2 = preorder_paths(t2);
  Json pairs = Json::array();
  for (const auto& p : alignment.pairs) {
    pairs.push_back({{"t1_path", paths1.at(p.node1)}, {"t2_path", paths2.at(p.node2)}, {"iou", p.iou}});
  }
  return {{"score", score.score}, {"n1", score.n1}, {"n2", score.n2}, {"pairs", std::move(pairs)}};
}

}  // namespace treealign
