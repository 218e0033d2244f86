#include "wltag/corpus_io.hpp"

#include <istream>
#include <json.hpp>
#include <ostream>

#include "wltag/error.hpp"
#include "wltag/text.hpp"

namespace wltag {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, const char* what, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const char* what, std::size_t lineno) {
  if (!j.contains(key))
    throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": bad \"" + key + "\": " + e.what());
  }
}

}  // namespace

std::vector<AnchoredSentence> read_anchored_corpus(std::istream& in) {
  std::vector<AnchoredSentence> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const json j = parse_line(line, "corpus", lineno);
    AnchoredSentence s;
    s.id = corpus.size();
    s.doc_id = j.value("doc_id", std::string{});
    s.tokens = field<std::vector<std::string>>(j, "tokens", "corpus", lineno);
    if (j.contains("anchors")) {
      for (const auto& a : j["anchors"]) {
        Anchor anchor;
        anchor.start = field<std::size_t>(a, "start", "corpus", lineno);
        anchor.end = field<std::size_t>(a, "end", "corpus", lineno);
        anchor.entity = field<std::string>(a, "entity", "corpus", lineno);
        s.anchors.push_back(std::move(anchor));
      }
    }
    try {
      s.validate();
    } catch (const ContractError& e) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

void write_anchored_corpus(std::ostream& out, const std::vector<AnchoredSentence>& corpus) {
  for (const auto& s : corpus) {
    json anchors = json::array();
    for (const auto& a : s.anchors) anchors.push_back({{"start", a.start}, {"end", a.end}, {"entity", a.entity}});
    out << json{{"doc_id", s.doc_id}, {"tokens", s.tokens}, {"anchors", anchors}}.dump() << '\n';
  }
}

WeakCorpus read_weak_corpus(std::istream& in) {
  WeakCorpus wc;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const json j = parse_line(line, "weak corpus", lineno);
    if (!have_header) {
      if (j.value("format", std::string{}) != "wltag-weak")
        throw FormatError("weak corpus: first line must be the format header");
      if (j.value("version", 0) != 1) throw FormatError("weak corpus: unsupported version");
      wc.types = TypeSystem::build(field<std::vector<std::string>>(j, "types", "weak corpus", lineno));
      have_header = true;
      continue;
    }
    WeaklyLabeledSentence s;
    s.id = field<std::size_t>(j, "id", "weak corpus", lineno);
    s.doc_id = j.value("doc_id", std::string{});
    s.tokens = field<std::vector<std::string>>(j, "tokens", "weak corpus", lineno);
    const auto labels = field<std::vector<std::string>>(j, "labels", "weak corpus", lineno);
    if (labels.size() != s.tokens.size())
      throw FormatError("weak corpus line " + std::to_string(lineno) + ": label/token count mismatch");
    for (const auto& l : labels) s.labels.push_back(wc.types.label(l));
    for (const auto& a : j.value("anchors", json::array())) {
      InducedAnchor ia;
      ia.start = field<std::size_t>(a, "start", "weak corpus", lineno);
      ia.end = field<std::size_t>(a, "end", "weak corpus", lineno);
      ia.entity = a.value("entity", std::string{});
      if (a.contains("type") && !a["type"].is_null()) {
        auto t = wc.types.find_type(a["type"].get<std::string>());
        if (!t) throw FormatError("weak corpus line " + std::to_string(lineno) + ": unknown type");
        ia.type = *t;
      }
      ia.probability = a.value("probability", 0.0);
      if (ia.start >= ia.end || ia.end > s.tokens.size())
        throw FormatError("weak corpus line " + std::to_string(lineno) + ": bad anchor span");
      s.anchors.push_back(std::move(ia));
    }
    s.quality = j.value("q", 0.0);
    s.coverage = j.value("n", 0.0);
    wc.sentences.push_back(std::move(s));
  }
  if (!have_header) throw FormatError("weak corpus: empty file");
  return wc;
}

void write_weak_corpus(std::ostream& out, const TypeSystem& types,
                       const std::vector<WeaklyLabeledSentence>& sentences) {
  out << json{{"format", "wltag-weak"}, {"version", 1}, {"types", types.types()}}.dump() << '\n';
  for (const auto& s : sentences) {
    std::vector<std::string> labels;
    for (auto y : s.labels) labels.push_back(types.label_name(y));
    json anchors = json::array();
    for (const auto& a : s.anchors) {
      anchors.push_back({{"start", a.start},
                         {"end", a.end},
                         {"entity", a.entity},
                         {"type", a.type ? json(types.type_name(*a.type)) : json(nullptr)},
                         {"probability", a.probability}});
    }
    out << json{{"id", s.id},       {"doc_id", s.doc_id}, {"tokens", s.tokens}, {"labels", labels},
                {"anchors", anchors}, {"q", s.quality},     {"n", s.coverage}}
               .dump()
        << '\n';
  }
}

std::vector<ConllSentence> read_conll(std::istream& in) {
  std::vector<ConllSentence> out;
  ConllSentence cur;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) {
      if (!cur.labels.empty() && cur.labels.size() != cur.tokens.size())
        throw FormatError("conll: sentence ending at line " + std::to_string(lineno) + " mixes labeled and bare tokens");
      out.push_back(std::move(cur));
    }
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) {
      flush();
      continue;
    }
    auto fields = split_tabs(line);
    if (fields[0].empty()) throw FormatError("conll line " + std::to_string(lineno) + ": empty token");
    cur.tokens.emplace_back(fields[0]);
    if (fields.size() >= 2) cur.labels.emplace_back(fields.back());
  }
  flush();
  return out;
}

void write_conll(std::ostream& out, const std::vector<ConllSentence>& sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i];
      if (i < s.labels.size()) out << '\t' << s.labels[i];
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<ConllSentence> to_conll(const std::vector<WeaklyLabeledSentence>& sentences, const TypeSystem& types) {
  std::vector<ConllSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    ConllSentence c;
    c.tokens = s.tokens;
    for (auto y : s.labels) c.labels.push_back(types.label_name(y));
    out.push_back(std::move(c));
  }
  return out;
}

void write_split_sidecar(std::ostream& out, const SplitSidecar& sidecar) {
  json sentences = json::array();
  for (const auto& r : sidecar.sentences) {
    sentences.push_back({{"id", r.id},
                         {"doc_id", r.doc_id},
                         {"q", r.quality},
                         {"n", r.coverage},
                         {"partition", std::string(partition_name(r.partition))}});
  }
  out << json{{"types", sidecar.types},
              {"theta_q", sidecar.theta_q},
              {"theta_n", sidecar.theta_n},
              {"sentences", sentences}}
             .dump(1)
      << '\n';
}

SplitSidecar read_split_sidecar(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("split sidecar: ") + e.what());
  }
  SplitSidecar sc;
  sc.types = field<std::vector<std::string>>(j, "types", "split sidecar", 1);
  sc.theta_q = field<double>(j, "theta_q", "split sidecar", 1);
  sc.theta_n = field<double>(j, "theta_n", "split sidecar", 1);
  for (const auto& r : field<json>(j, "sentences", "split sidecar", 1)) {
    SplitRecord rec;
    rec.id = field<std::size_t>(r, "id", "split sidecar", 1);
    rec.doc_id = r.value("doc_id", std::string{});
    rec.quality = field<double>(r, "q", "split sidecar", 1);
    rec.coverage = field<double>(r, "n", "split sidecar", 1);
    rec.partition = parse_partition(field<std::string>(r, "partition", "split sidecar", 1));
    sc.sentences.push_back(std::move(rec));
  }
  return sc;
}

std::vector<WeaklyLabeledSentence> join_split(const std::vector<ConllSentence>& conll, const SplitSidecar& sidecar,
                                              const TypeSystem& types) {
  if (conll.size() != sidecar.sentences.size())
    throw FormatError("split: CoNLL has " + std::to_string(conll.size()) + " sentences, sidecar has " +
                      std::to_string(sidecar.sentences.size()));
  std::vector<WeaklyLabeledSentence> out;
  out.reserve(conll.size());
  for (std::size_t k = 0; k < conll.size(); ++k) {
    const auto& c = conll[k];
    const auto& r = sidecar.sentences[k];
    if (c.labels.size() != c.tokens.size()) throw FormatError("split: sentence without labels");
    WeaklyLabeledSentence s;
    s.id = r.id;
    s.doc_id = r.doc_id;
    s.tokens = c.tokens;
    s.quality = r.quality;
    s.coverage = r.coverage;
    for (const auto& l : c.labels) s.labels.push_back(types.label(l));

    for (std::size_t i = 0; i < s.labels.size();) {
      const LabelId y = s.labels[i];
      const bool typed_begin = types.is_typed(y) && y != TypeSystem::outside();
      const bool nt = y == types.begin_untyped() || y == types.inside_untyped();
      if (!typed_begin && !nt) {
        ++i;
        continue;
      }
      InducedAnchor a;
      a.start = i;
      a.type = types.type_of(y);
      const LabelId cont = a.type ? TypeSystem::inside(*a.type) : types.inside_untyped();
      ++i;
      while (i < s.labels.size() && s.labels[i] == cont) ++i;
      a.end = i;
      a.probability = 1.0;
      s.anchors.push_back(std::move(a));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wltag
