#include "treealign/cli.hpp"

#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "treealign/align.hpp"
#include "treealign/error.hpp"
#include "treealign/ingest.hpp"
#include "treealign/parseval.hpp"
#include "treealign/perturb.hpp"
#include "treealign/segeval.hpp"

namespace treealign::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return Json(v).dump(); }

Granularity parse_unit(const std::string& unit) { return unit == "char" ? Granularity::character : Granularity::word; }

TreeFormat parse_format(const std::string& f) {
  if (f == "json") return TreeFormat::json;
  if (f == "bracket") return TreeFormat::bracketed;
  return TreeFormat::automatic;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
}

std::vector<BoundarySequence> load_boundaries(const std::string& path, std::vector<std::optional<std::string>>* ids) {
  std::vector<BoundarySequence> out;
  for (auto& u : read_word_spans(path)) {
    out.push_back(remove_gaps(u.words));
    if (ids) ids->push_back(u.id);
  }
  return out;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string gold, pred, format = "auto", unit = "word", alignments, report;
  bool labeled = false, corpus = false, per_sentence = false, include_preterminals = true;
  bool strip_tags = false, skip_invalid = false;
  unsigned jobs = 1;
};

int run_eval(const EvalArgs& a, bool as_json, const std::string& out_path, std::ostream& out, std::ostream& err) {
  LoadOptions load;
  load.format = parse_format(a.format);
  load.granularity = parse_unit(a.unit);
  load.brackets.strip_function_tags = a.strip_tags;
  load.skip_invalid = a.skip_invalid;
  auto corpus = load_corpus(a.gold, a.pred, load);
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";

  AlignOptions options;
  options.label_mode = a.labeled ? LabelMode::exact_label : LabelMode::unlabeled;
  options.include_preterminals = a.include_preterminals;
  const EvalReport report = corpus_struct_iou(corpus.pairs, options, a.jobs);

  const Json config = {{"command", "eval"},         {"gold", a.gold},
                       {"pred", a.pred},            {"label_mode", a.labeled ? "exact_label" : "unlabeled"},
                       {"include_preterminals", a.include_preterminals},
                       {"unit", a.unit},            {"epsilon", coordinate_epsilon()}};
  if (!a.report.empty()) write_report(report, a.report, config);
  if (!a.alignments.empty()) {
    std::string lines;
    for (std::size_t k = 0; k < corpus.pairs.size(); ++k) {
      const auto& p = corpus.pairs[k];
      const Alignment al = max_alignment(p.gold, p.pred, options);
      Json j = alignment_to_json(p.gold, p.pred, al, report.sentences[k].score);
      j["id"] = p.id;
      lines += j.dump() + "\n";
    }
    write_text(a.alignments, lines);
  }

  std::ostringstream text;
  if (as_json) {
    text << report_to_json(report, config).dump(2) << "\n";
  } else {
    if (a.per_sentence) {
      text << "id\tscore\tn1\tn2\n";
      for (const auto& s : report.sentences) {
        text << s.id << "\t" << num(s.score.score) << "\t" << s.score.n1 << "\t" << s.score.n2 << "\n";
      }
    }
    if (a.corpus || !a.per_sentence) {
      text << "corpus\t" << num(report.corpus) << "\n"
           << "sentence_mean\t" << num(report.sentence_mean) << "\n"
           << "sentences\t" << report.sentences.size() << "\n";
    }
  }
  emit(text.str(), out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- parseval

struct ParsevalArgs {
  std::string gold, pred;
  bool unlabeled = false, micro = false, macro = false, include_preterminals = false, strip_tags = false;
  std::vector<std::string> ignore_tokens;
};

int run_parseval(const ParsevalArgs& a, bool as_json, const std::string& out_path, std::ostream& out) {
  BracketReadOptions read;
  read.strip_function_tags = a.strip_tags;
  read.ignore_tokens = a.ignore_tokens;
  const auto gold = read_bracketed(a.gold, read);
  const auto pred = read_bracketed(a.pred, read);
  if (gold.size() != pred.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) + " parses but pred has " +
                    std::to_string(pred.size()));
  }
  BracketOptions options;
  options.labeled = !a.unlabeled;
  options.include_preterminals = a.include_preterminals;
  std::vector<BracketSetPair> pairs;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    const auto gw = leaf_words(gold[k].parse);
    const auto pw = leaf_words(pred[k].parse);
    if (gw.size() != pw.size()) {
      throw DataError("parse " + std::to_string(k) + ": gold has " + std::to_string(gw.size()) +
                      " words but pred has " + std::to_string(pw.size()));
    }
    pairs.push_back({extract_brackets(gold[k].parse, options), extract_brackets(pred[k].parse, options)});
  }
  const CorpusPrf scores = score_corpus(pairs);
  const bool macro = a.macro && !a.micro;
  Json j = prf_to_json(scores.micro);
  if (macro) {
    j["precision"] = scores.macro_precision;
    j["recall"] = scores.macro_recall;
    j["f1"] = scores.macro_f1;
  }
  j["averaging"] = macro ? "macro" : "micro";
  j["sentences"] = pairs.size();
  j["config"] = {{"command", "parseval"},
                 {"gold", a.gold},
                 {"pred", a.pred},
                 {"labeled", options.labeled},
                 {"include_preterminals", options.include_preterminals},
                 {"strip_function_tags", a.strip_tags},
                 {"ignore_tokens", a.ignore_tokens}};

  std::ostringstream text;
  if (as_json) {
    text << j.dump(2) << "\n";
  } else {
    text << "averaging\t" << (macro ? "macro" : "micro") << "\n"
         << "precision\t" << num(j["precision"].get<double>()) << "\n"
         << "recall\t" << num(j["recall"].get<double>()) << "\n"
         << "f1\t" << num(j["f1"].get<double>()) << "\n"
         << "matched\t" << scores.micro.matched << "\n"
         << "gold\t" << scores.micro.gold << "\n"
         << "pred\t" << scores.micro.pred << "\n";
  }
  emit(text.str(), out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- segeval

struct SegevalArgs {
  std::string ref, hyp;
  double tolerance = kDefaultBoundaryTolerance;
  bool miou = false, matched_only = false;
};

int run_segeval(const SegevalArgs& a, bool as_json, const std::string& out_path, std::ostream& out) {
  const auto ref = load_boundaries(a.ref, nullptr);
  const auto hyp = load_boundaries(a.hyp, nullptr);
  if (ref.size() != hyp.size()) {
    throw DataError("reference has " + std::to_string(ref.size()) + " utterances but hypothesis has " +
                    std::to_string(hyp.size()));
  }
  if (ref.empty()) throw DataError("nothing to score: no utterances");
  Json j;
  std::ostringstream text;
  if (a.miou) {
    const MiouMode mode = a.matched_only ? MiouMode::matched_only : MiouMode::strict;
    double total = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      total += segment_miou(SpanSet::from_boundaries(ref[k]), SpanSet::from_boundaries(hyp[k]), mode);
    }
    j = {{"miou", total / static_cast<double>(ref.size())},
         {"mode", a.matched_only ? "matched_only" : "strict"},
         {"utterances", ref.size()}};
    text << "miou\t" << num(j["miou"].get<double>()) << "\n";
  } else {
    std::size_t matched = 0, gold = 0, pred = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const Prf p = boundary_prf(ref[k], hyp[k], a.tolerance);
      matched += p.matched;
      gold += p.gold;
      pred += p.pred;
    }
    const Prf p = make_prf(matched, gold, pred);
    j = prf_to_json(p);
    j["tolerance"] = a.tolerance;
    j["utterances"] = ref.size();
    text << "precision\t" << num(p.precision) << "\nrecall\t" << num(p.recall) << "\nf1\t" << num(p.f1) << "\n";
  }
  j["config"] = {{"command", "segeval"}, {"ref", a.ref}, {"hyp", a.hyp}, {"epsilon", coordinate_epsilon()}};
  emit(as_json ? j.dump(2) + "\n" : text.str(), out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- project

struct ProjectArgs {
  std::string trees, boundaries, unit = "word";
  bool case_insensitive = false, strip_tags = false;
};

int run_project(const ProjectArgs& a, const std::string& out_path, std::ostream& out) {
  BracketReadOptions read;
  read.strip_function_tags = a.strip_tags;
  const auto parses = read_bracketed(a.trees, read);
  std::string lines;
  if (!a.boundaries.empty()) {
    std::vector<std::optional<std::string>> ids;
    const auto bounds = load_boundaries(a.boundaries, &ids);
    if (bounds.size() != parses.size()) {
      throw DataError(std::to_string(parses.size()) + " parses but " + std::to_string(bounds.size()) +
                      " boundary utterances");
    }
    for (std::size_t k = 0; k < parses.size(); ++k) {
      try {
        const SegmentTree t = attach_boundaries(parses[k].parse, bounds[k], {.case_insensitive = a.case_insensitive});
        lines += format_time_tree({ids[k], t, parses[k].line}) + "\n";
      } catch (const DataError& e) {
        throw DataError(a.trees + ":" + std::to_string(parses[k].line) + ": " + e.what());
      }
    }
  } else {
    for (const auto& p : parses) {
      lines += format_time_tree({std::nullopt, project_text(p.parse, parse_unit(a.unit)), p.line}) + "\n";
    }
  }
  emit(lines, out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string kind, boundaries, trees, manifest;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

int run_perturb(const PerturbArgs& a, const std::string& out_path, std::ostream& out) {
  PerturbSpec spec{parse_perturb_kind(a.kind), a.delta, a.seed};
  if (!(spec.delta >= 0.0 && spec.delta <= 1.0)) throw UsageError("--delta must lie in [0, 1]");
  if (a.boundaries.empty() == a.trees.empty()) throw UsageError("give exactly one of --boundaries or --trees");
  if (spec.kind == PerturbKind::insert && a.trees.empty()) throw UsageError("insert perturbation needs --trees");

  std::string lines;
  std::string manifest;
  auto record = [&](std::size_t k, const std::optional<std::string>& id, std::uint64_t stream) {
    Json m = {{"index", k}, {"kind", to_string(spec.kind)}, {"delta", spec.delta}, {"seed", spec.seed},
              {"stream_seed", stream}};
    if (id) m["id"] = *id;
    manifest += m.dump() + "\n";
  };
  auto boundary_line = [](const BoundarySequence& b, const std::optional<std::string>& id) {
    if (!id) return boundaries_to_json(b).dump() + "\n";
    return Json{{"id", *id}, {"words", boundaries_to_json(b)}}.dump() + "\n";
  };

  if (!a.boundaries.empty()) {
    std::vector<std::optional<std::string>> ids;
    const auto all = load_boundaries(a.boundaries, &ids);
    for (std::size_t k = 0; k < all.size(); ++k) {
      const std::uint64_t stream = Rng::derive_seed(spec.seed, k);
      Rng rng(stream);
      const BoundarySequence b = spec.kind == PerturbKind::noise ? perturb_noise(all[k], spec.delta, rng)
                                                                 : perturb_delete(all[k], spec.delta, rng);
      lines += boundary_line(b, ids[k]);
      record(k, ids[k], stream);
    }
  } else {
    const auto records = read_time_trees(a.trees);
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& r = records[k];
      require_valid(r.tree);
      const std::uint64_t stream = Rng::derive_seed(spec.seed, k);
      Rng rng(stream);
      switch (spec.kind) {
        case PerturbKind::noise: {
          const auto b = perturb_noise(leaf_boundaries(r.tree), spec.delta, rng);
          lines += format_time_tree({r.id, retime_leaves(r.tree, b), r.line}) + "\n";
          break;
        }
        case PerturbKind::insert:
          lines += format_time_tree({r.id, perturb_insert(r.tree, spec.delta, rng), r.line}) + "\n";
          break;
        case PerturbKind::del:
          lines += boundary_line(perturb_delete(leaf_boundaries(r.tree), spec.delta, rng), r.id);
          break;
      }
      record(k, r.id, stream);
    }
  }
  if (!a.manifest.empty()) write_text(a.manifest, manifest);
  emit(lines, out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- mbr

struct MbrArgs {
  std::string candidates, loss = "miou";
  bool matched_only = false, labeled = false;
};

MbrCandidate candidate_from_json(const Json& j) {
  if (j.is_string()) return parse_bracketed(j.get<std::string>());
  if (!j.is_array()) throw ParseError("a candidate is a bracketed string or an array of spans");
  std::vector<Interval> spans;
  for (const auto& s : j) {
    if (s.is_array() && s.size() == 2) {
      spans.emplace_back(s[0].get<double>(), s[1].get<double>());
    } else if (s.is_object()) {
      spans.emplace_back(s.at("start").get<double>(), s.at("end").get<double>());
    } else {
      throw ParseError("a span is [start, end] or {\"start\", \"end\"}");
    }
  }
  return SpanSet(std::move(spans));
}

int run_mbr(const MbrArgs& a, const std::string& out_path, std::ostream& out) {
  const MbrLoss loss = a.loss == "treef1" ? MbrLoss::tree_f1 : MbrLoss::miou;
  MbrOptions options;
  options.miou_mode = a.matched_only ? MiouMode::matched_only : MiouMode::strict;
  options.brackets.labeled = a.labeled;
  std::string lines;
  for (const auto& [number, text] : read_lines(a.candidates)) {
    try {
      const Json j = Json::parse(text);
      std::optional<std::string> id;
      if (j.is_object() && j.contains("id")) id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      const Json& list = j.is_object() ? j.at("candidates") : j;
      std::vector<MbrCandidate> candidates;
      for (const auto& c : list) candidates.push_back(candidate_from_json(c));
      Json result = {{"index", mbr_select(candidates, loss, options)}};
      if (id) result["id"] = *id;
      lines += result.dump() + "\n";
    } catch (const Json::exception& e) {
      throw ParseError(a.candidates + ":" + std::to_string(number) + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError(a.candidates + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  emit(lines, out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string trees, format = "auto", unit = "word";
};

int run_validate(const ValidateArgs& a, bool as_json, const std::string& out_path, std::ostream& out) {
  LoadOptions load;
  load.format = parse_format(a.format);
  load.granularity = parse_unit(a.unit);
  const auto records = read_trees(a.trees, load, false);
  Json listing = Json::array();
  std::ostringstream text;
  std::size_t bad = 0;
  for (const auto& r : records) {
    const auto violations = validate(r.tree);
    if (violations.empty()) continue;
    ++bad;
    Json entry = {{"line", r.line}, {"violations", Json::array()}};
    if (r.id) entry["id"] = *r.id;
    for (const auto& v : violations) {
      entry["violations"].push_back({{"path", v.path}, {"condition", to_string(v.condition)}, {"message", v.message}});
      text << a.trees << ":" << r.line << ": " << to_string(v.condition) << ": " << v.message << "\n";
    }
    listing.push_back(std::move(entry));
  }
  if (as_json) {
    emit(Json{{"trees", records.size()}, {"invalid", bad}, {"records", listing}}.dump(2) + "\n", out_path, out);
  } else {
    text << records.size() << " trees, " << bad << " invalid\n";
    emit(text.str(), out_path, out);
  }
  return bad == 0 ? kOk : kDataError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* eps = std::getenv("TREEALIGN_EPSILON")) {
    try {
      std::size_t used = 0;
      const double value = std::stod(eps, &used);
      if (used != std::string(eps).size()) throw std::invalid_argument("trailing characters");
      set_coordinate_epsilon(value);
    } catch (const std::exception&) {
      err << "error: TREEALIGN_EPSILON must be a non-negative number, got '" << eps << "'\n";
      return kUsageError;
    }
  } else {
    set_coordinate_epsilon(1e-9);
  }

  CLI::App app{"Constituency parse evaluation over time-aligned and text parse trees", "treealign"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(TREEALIGN_VERSION));
  bool as_json = false;
  std::string out_path;
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", as_json, "Machine-readable JSON on stdout");
    sub->add_option("--out", out_path, "Write results to this file instead of stdout");
  };

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Struct-IoU between gold and predicted trees");
  eval_cmd->add_option("--gold", eval.gold, "Gold trees (time-tree JSONL or bracketed)")->required();
  eval_cmd->add_option("--pred", eval.pred, "Predicted trees (time-tree JSONL or bracketed)")->required();
  eval_cmd->add_option("--format", eval.format, "Input format")->check(CLI::IsMember({"auto", "json", "bracket"}));
  eval_cmd->add_option("--unit", eval.unit, "Unit for bracketed input")->check(CLI::IsMember({"word", "char"}));
  eval_cmd->add_flag("--labeled", eval.labeled, "Only align nodes with identical labels");
  eval_cmd->add_flag("--corpus", eval.corpus, "Print corpus-level scores");
  eval_cmd->add_flag("--per-sentence", eval.per_sentence, "Print one line per sentence");
  eval_cmd->add_flag("--include-preterminals,!--exclude-preterminals", eval.include_preterminals,
                     "Count and align leaf nodes (default on)");
  eval_cmd->add_flag("--strip-function-tags", eval.strip_tags, "Strip PTB function tags from labels");
  eval_cmd->add_flag("--skip-invalid", eval.skip_invalid, "Drop pairs with invalid trees instead of failing");
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--alignments", eval.alignments, "Write per-sentence alignments (JSONL) here");
  eval_cmd->add_option("--report", eval.report, "Write the JSON report here");
  common(eval_cmd);

  ParsevalArgs parseval;
  auto* parseval_cmd = app.add_subcommand("parseval", "Bracket precision/recall/F1");
  parseval_cmd->add_option("--gold", parseval.gold, "Gold bracketed parses")->required();
  parseval_cmd->add_option("--pred", parseval.pred, "Predicted bracketed parses")->required();
  parseval_cmd->add_flag("--unlabeled", parseval.unlabeled, "Ignore constituent labels");
  parseval_cmd->add_flag("--micro", parseval.micro, "Pool counts over the corpus (default)");
  parseval_cmd->add_flag("--macro", parseval.macro, "Average sentence scores");
  parseval_cmd->add_flag("--include-preterminals", parseval.include_preterminals, "Count preterminal brackets");
  parseval_cmd->add_flag("--strip-function-tags", parseval.strip_tags, "Strip PTB function tags from labels");
  parseval_cmd->add_option("--ignore-tokens", parseval.ignore_tokens, "Tokens to drop before scoring");
  common(parseval_cmd);

  SegevalArgs segeval;
  auto* segeval_cmd = app.add_subcommand("segeval", "Word segmentation metrics");
  segeval_cmd->add_option("--ref", segeval.ref, "Reference word boundaries")->required();
  segeval_cmd->add_option("--hyp", segeval.hyp, "Hypothesis word boundaries")->required();
  segeval_cmd->add_option("--tolerance", segeval.tolerance, "Boundary tolerance in seconds")
      ->check(CLI::NonNegativeNumber);
  segeval_cmd->add_flag("--miou", segeval.miou, "Report matching-based mean IoU instead of boundary F1");
  segeval_cmd->add_flag("--matched-only", segeval.matched_only, "mIoU over matched pairs only");
  common(segeval_cmd);

  ProjectArgs project;
  auto* project_cmd = app.add_subcommand("project", "Turn bracketed parses into segment trees");
  project_cmd->add_option("--trees", project.trees, "Bracketed parses")->required();
  project_cmd->add_option("--boundaries", project.boundaries, "Word boundaries to attach");
  project_cmd->add_option("--unit", project.unit, "Unit projection")->check(CLI::IsMember({"word", "char"}));
  project_cmd->add_flag("--case-insensitive", project.case_insensitive, "Compare words ignoring ASCII case");
  project_cmd->add_flag("--strip-function-tags", project.strip_tags, "Strip PTB function tags from labels");
  common(project_cmd);

  PerturbArgs perturb;
  auto* perturb_cmd = app.add_subcommand("perturb", "Seeded word-boundary perturbations");
  perturb_cmd->add_option("--kind", perturb.kind, "Perturbation kind")
      ->required()
      ->check(CLI::IsMember({"noise", "insert", "delete"}));
  perturb_cmd->add_option("--delta", perturb.delta, "Perturbation level in [0, 1]")->required();
  perturb_cmd->add_option("--seed", perturb.seed, "Corpus seed")->required();
  perturb_cmd->add_option("--boundaries", perturb.boundaries, "Word boundaries to perturb");
  perturb_cmd->add_option("--trees", perturb.trees, "Time trees (JSONL) to perturb");
  perturb_cmd->add_option("--manifest", perturb.manifest, "Write per-utterance settings (JSONL) here");
  common(perturb_cmd);

  MbrArgs mbr;
  auto* mbr_cmd = app.add_subcommand("mbr", "Minimum Bayes risk selection among candidates");
  mbr_cmd->add_option("--candidates", mbr.candidates, "Candidate sets, one JSON line per utterance")->required();
  mbr_cmd->add_option("--loss", mbr.loss, "Loss")->check(CLI::IsMember({"miou", "treef1"}));
  mbr_cmd->add_flag("--matched-only", mbr.matched_only, "mIoU over matched pairs only");
  mbr_cmd->add_flag("--labeled", mbr.labeled, "Labeled bracket F1 for the tree loss");
  common(mbr_cmd);

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Check trees against the segment-tree conditions");
  validate_cmd->add_option("--trees", val.trees, "Trees (time-tree JSONL or bracketed)")->required();
  validate_cmd->add_option("--format", val.format, "Input format")->check(CLI::IsMember({"auto", "json", "bracket"}));
  validate_cmd->add_option("--unit", val.unit, "Unit for bracketed input")->check(CLI::IsMember({"word", "char"}));
  common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(eval, as_json, out_path, out, err);
    if (parseval_cmd->parsed()) return run_parseval(parseval, as_json, out_path, out);
    if (segeval_cmd->parsed()) return run_segeval(segeval, as_json, out_path, out);
    if (project_cmd->parsed()) return run_project(project, out_path, out);
    if (perturb_cmd->parsed()) return run_perturb(perturb, out_path, out);
    if (mbr_cmd->parsed()) return run_mbr(mbr, out_path, out);
    if (validate_cmd->parsed()) return run_validate(val, as_json, out_path, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace treealign::cli
