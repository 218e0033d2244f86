#include "wltag/evaluation.hpp"

#include <algorithm>
#include <set>

#include "wltag/error.hpp"

namespace wltag {

namespace {

struct Tag {
  char boundary = 'O';  // 'B', 'I' or 'O'
  std::string type;
};

Tag parse_tag(const std::string& label) {
  if (label.size() > 2 && (label[0] == 'B' || label[0] == 'I') && label[1] == '-') {
    std::string type = label.substr(2);
    if (type != "NT") return {label[0], std::move(type)};
  }
  return {};
}

}  // namespace

std::vector<MentionSpan> extract_mentions(const std::vector<std::string>& labels) {
  std::vector<MentionSpan> out;
  bool open = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Tag tag = parse_tag(labels[i]);
    const bool continues = open && tag.boundary == 'I' && tag.type == out.back().type;
    if (continues) {
      out.back().end = i + 1;
      continue;
    }
    open = false;
    if (tag.boundary == 'B' || tag.boundary == 'I') {
      out.push_back({i, i + 1, tag.type});
      open = true;
    }
  }
  return out;
}

std::vector<MentionSpan> extract_mentions(const std::vector<LabelId>& labels, const TypeSystem& types) {
  std::vector<std::string> names;
  names.reserve(labels.size());
  for (LabelId y : labels) names.push_back(types.is_typed(y) ? types.label_name(y) : "O");
  return extract_mentions(names);
}

std::vector<std::string> render_bio(const std::vector<MentionSpan>& spans, std::size_t length) {
  std::vector<std::string> out(length, "O");
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > length) throw ContractError("span outside the sentence");
    out[s.start] = "B-" + s.type;
    for (std::size_t i = s.start + 1; i < s.end; ++i) out[i] = "I-" + s.type;
  }
  return out;
}

PrfScore finalize_score(std::size_t gold, std::size_t predicted, std::size_t correct) {
  PrfScore s{gold, predicted, correct, 0.0, 0.0, 0.0};
  s.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
  s.recall = gold ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

bool EvalResult::operator==(const EvalResult& o) const {
  auto same = [](const PrfScore& a, const PrfScore& b) {
    return a.gold == b.gold && a.predicted == b.predicted && a.correct == b.correct && a.precision == b.precision &&
           a.recall == b.recall && a.f1 == b.f1;
  };
  if (!same(overall, o.overall) || per_type.size() != o.per_type.size()) return false;
  for (const auto& [t, s] : per_type) {
    auto it = o.per_type.find(t);
    if (it == o.per_type.end() || !same(s, it->second)) return false;
  }
  return true;
}

EvalResult evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted) {
  if (gold.size() != predicted.size()) throw ContractError("gold and predicted sentence counts differ");
  struct Counts {
    std::size_t gold = 0, predicted = 0, correct = 0;
  };
  std::map<std::string, Counts> per_type;
  Counts all;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (gold[k].size() != predicted[k].size())
      throw ContractError("sentence " + std::to_string(k) + ": gold and predicted lengths differ");
    const auto g = extract_mentions(gold[k]);
    const auto p = extract_mentions(predicted[k]);
    const std::set<MentionSpan> gold_set(g.begin(), g.end());
    for (const auto& m : g) ++per_type[m.type].gold;
    for (const auto& m : p) {
      auto& c = per_type[m.type];
      ++c.predicted;
      if (gold_set.count(m)) ++c.correct;
    }
  }
  EvalResult r;
  for (const auto& [t, c] : per_type) {
    r.per_type[t] = finalize_score(c.gold, c.predicted, c.correct);
    all.gold += c.gold;
    all.predicted += c.predicted;
    all.correct += c.correct;
  }
  r.overall = finalize_score(all.gold, all.predicted, all.correct);
  return r;
}

}  // namespace wltag
