#include "wltag/taxonomy.hpp"

#include <algorithm>

#include <istream>
#include <json.hpp>

#include "wltag/error.hpp"
#include "wltag/text.hpp"

namespace wltag {

CategoryId TaxonomyGraph::add_category(std::string_view name) {
  auto [it, inserted] = index_.try_emplace(std::string(name), names_.size());
  if (inserted) {
    names_.emplace_back(name);
    children_.emplace_back();
  }
  return it->second;
}

void TaxonomyGraph::add_edge(std::string_view parent, std::string_view child) {
  const CategoryId p = add_category(parent);
  const CategoryId c = add_category(child);
  children_[p].push_back(c);
}

std::optional<CategoryId> TaxonomyGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CategoryId TaxonomyGraph::id(std::string_view name) const {
  auto c = find(name);
  if (!c) throw LookupError("unknown category: " + std::string(name));
  return *c;
}

std::vector<bool> TaxonomyGraph::descendants(CategoryId root) const {
  if (root >= size()) throw LookupError("category id out of range");
  std::vector<bool> seen(size(), false);
  std::vector<CategoryId> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const CategoryId c = stack.back();
    stack.pop_back();
    for (CategoryId child : children_[c]) {
      if (!seen[child]) {
        seen[child] = true;
        stack.push_back(child);
      }
    }
  }
  return seen;
}

TaxonomyGraph TaxonomyGraph::read_tsv(std::istream& in) {
  TaxonomyGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw FormatError("taxonomy line " + std::to_string(lineno) + ": expected parent<TAB>child");
    g.add_edge(fields[0], fields[1]);
  }
  return g;
}

bool is_descendant(const TaxonomyGraph& taxonomy, CategoryId c, CategoryId root) {
  if (c >= taxonomy.size() || root >= taxonomy.size()) throw LookupError("category id out of range");
  if (c == root) return true;
  return taxonomy.descendants(root)[c];
}

bool is_descendant(const TaxonomyGraph& taxonomy, std::string_view c, std::string_view root) {
  return is_descendant(taxonomy, taxonomy.id(c), taxonomy.id(root));
}

void GammaMapping::set(std::string type, std::string root_category) {
  for (const auto& [t, r] : entries_)
    if (t == type) throw FormatError("type mapped twice in gamma: " + type);
  entries_.emplace_back(std::move(type), std::move(root_category));
}

const std::string& GammaMapping::root(std::string_view type) const {
  for (const auto& [t, r] : entries_)
    if (t == type) return r;
  throw LookupError("no root category for type: " + std::string(type));
}

void GammaMapping::validate(const TypeSystem& types, const TaxonomyGraph& taxonomy) const {
  for (const auto& t : types.types()) {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == t; });
    if (it == entries_.end()) throw ConfigError("no root category for type: " + t);
    const auto& r = it->second;
    if (!taxonomy.find(r)) throw ConfigError("root category of " + t + " not in taxonomy: " + r);
  }
}

GammaMapping GammaMapping::read_tsv(std::istream& in) {
  GammaMapping gamma;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw FormatError("gamma line " + std::to_string(lineno) + ": expected TYPE<TAB>root_category");
    gamma.set(std::string(fields[0]), std::string(fields[1]));
  }
  return gamma;
}

void EntityCatalog::add(std::string entity, std::vector<CategoryId> categories) {
  entities_[std::move(entity)] = std::move(categories);
}

const std::vector<CategoryId>* EntityCatalog::categories(std::string_view entity) const {
  auto it = entities_.find(std::string(entity));
  return it == entities_.end() ? nullptr : &it->second;
}

EntityCatalog EntityCatalog::read_jsonl(std::istream& in, const TaxonomyGraph& taxonomy) {
  EntityCatalog catalog;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("catalog line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      throw FormatError("catalog line " + std::to_string(lineno) + ": missing string \"id\"");
    std::vector<CategoryId> cats;
    if (j.contains("categories")) {
      for (const auto& c : j["categories"]) {
        if (!c.is_string()) throw FormatError("catalog line " + std::to_string(lineno) + ": non-string category");
        if (auto id = taxonomy.find(c.get<std::string>()))
          cats.push_back(*id);
        else
          ++catalog.dropped_;
      }
    }
    catalog.add(j["id"].get<std::string>(), std::move(cats));
  }
  return catalog;
}

TypeResolver::TypeResolver(const TypeSystem& types, const TaxonomyGraph& taxonomy, const GammaMapping& gamma)
    : types_(&types), taxonomy_(&taxonomy) {
  gamma.validate(types, taxonomy);
  members_.reserve(types.num_types());
  for (const auto& t : types.types()) members_.push_back(taxonomy.descendants(taxonomy.id(gamma.root(t))));
}

bool TypeResolver::under_type(CategoryId c, std::size_t type) const {
  const auto& m = members_.at(type);
  return c < m.size() && m[c];
}

TypeInduction TypeResolver::pick(std::span<const std::size_t> counts, std::size_t total) const {
  TypeInduction out;
  if (total == 0) return out;
  std::size_t best = 0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] > best) {
      best = counts[t];
      out.type = t;
    }
  }
  if (out.type) out.probability = static_cast<double>(best) / static_cast<double>(total);
  return out;
}

TypeInduction TypeResolver::induce(std::span<const CategoryId> cats) const {
  std::vector<std::size_t> counts(members_.size(), 0);
  for (CategoryId c : cats)
    for (std::size_t t = 0; t < members_.size(); ++t)
      if (under_type(c, t)) ++counts[t];
  return pick(counts, cats.size());
}

TypeInduction TypeResolver::induce(std::span<const std::string> cats) const {
  std::vector<std::size_t> counts(members_.size(), 0);
  for (const auto& name : cats) {
    auto c = taxonomy_->find(name);
    if (!c) continue;
    for (std::size_t t = 0; t < members_.size(); ++t)
      if (under_type(*c, t)) ++counts[t];
  }
  return pick(counts, cats.size());
}

}  // namespace wltag
