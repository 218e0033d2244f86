#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "wltag/labels.hpp"

namespace wltag {

struct MentionSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string type;

  auto operator<=>(const MentionSpan&) const = default;
};

// Maximal B-t (I-t)* runs. An I-t that does not continue a run of type t opens
// a new mention (conlleval repair). Anything that is not B-x/I-x counts as O.
std::vector<MentionSpan> extract_mentions(const std::vector<std::string>& labels);
std::vector<MentionSpan> extract_mentions(const std::vector<LabelId>& labels, const TypeSystem& types);

// Renders well-formed, non-overlapping spans as BIO labels.
std::vector<std::string> render_bio(const std::vector<MentionSpan>& spans, std::size_t length);

struct PrfScore {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalResult {
  PrfScore overall;
  std::map<std::string, PrfScore> per_type;

  bool operator==(const EvalResult& o) const;
};

// Exact (start, end, type) match. Throws ContractError when sentence counts or
// lengths differ.
EvalResult evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted);

PrfScore finalize_score(std::size_t gold, std::size_t predicted, std::size_t correct);

}  // namespace wltag
