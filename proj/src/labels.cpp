#include "wltag/labels.hpp"

#include <unordered_set>

#include "wltag/error.hpp"

namespace wltag {

TypeSystem TypeSystem::build(std::vector<std::string> types) {
  if (types.empty()) throw ConfigError("type list is empty");
  std::unordered_set<std::string> seen;
  for (const auto& t : types) {
    if (t.empty()) throw ConfigError("empty entity type name");
    if (!seen.insert(t).second) throw ConfigError("duplicate entity type: " + t);
  }

  TypeSystem ts;
  ts.types_ = std::move(types);
  ts.names_.push_back("O");
  for (const auto& t : ts.types_) {
    ts.names_.push_back("B-" + t);
    ts.names_.push_back("I-" + t);
  }
  ts.names_.push_back("UN");
  ts.names_.push_back("B-NT");
  ts.names_.push_back("I-NT");
  if (ts.names_.size() != ts.num_weak_labels()) throw ConfigError("label name collision");
  for (std::size_t i = 0; i < ts.names_.size(); ++i) {
    if (!ts.index_.emplace(ts.names_[i], static_cast<LabelId>(i)).second)
      throw ConfigError("type name produces a clashing label: " + ts.names_[i]);
  }
  return ts;
}

std::optional<std::size_t> TypeSystem::find_type(std::string_view name) const {
  for (std::size_t t = 0; t < types_.size(); ++t)
    if (types_[t] == name) return t;
  return std::nullopt;
}

std::optional<std::size_t> TypeSystem::type_of(LabelId y) const {
  if (y <= 0 || !is_typed(y)) return std::nullopt;
  return static_cast<std::size_t>((y - 1) / 2);
}

std::optional<LabelId> TypeSystem::find_label(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelId TypeSystem::label(std::string_view name) const {
  auto y = find_label(name);
  if (!y) throw LookupError("unknown label: " + std::string(name));
  return *y;
}

}  // namespace wltag
