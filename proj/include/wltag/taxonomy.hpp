#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wltag/labels.hpp"

namespace wltag {

using CategoryId = std::size_t;

// Category graph with downward (parent -> child) edges. Cycles are tolerated.
class TaxonomyGraph {
 public:
  // Interns the category if it is new.
  CategoryId add_category(std::string_view name);
  void add_edge(std::string_view parent, std::string_view child);

  std::size_t size() const { return names_.size(); }
  std::optional<CategoryId> find(std::string_view name) const;
  // Throws LookupError for unknown names.
  CategoryId id(std::string_view name) const;
  const std::string& name(CategoryId c) const { return names_.at(c); }
  const std::vector<CategoryId>& children(CategoryId c) const { return children_.at(c); }

  // root itself plus everything reachable from it; visited-set guarded.
  std::vector<bool> descendants(CategoryId root) const;

  // Reads `parent<TAB>child` lines. Blank lines and lines starting with '#' are skipped.
  static TaxonomyGraph read_tsv(std::istream& in);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<CategoryId>> children_;
  std::unordered_map<std::string, CategoryId> index_;
};

// True iff c == root or c is reachable from root. Throws LookupError on unknown ids.
bool is_descendant(const TaxonomyGraph& taxonomy, CategoryId c, CategoryId root);
bool is_descendant(const TaxonomyGraph& taxonomy, std::string_view c, std::string_view root);

// Entity type -> root category (Γ).
class GammaMapping {
 public:
  void set(std::string type, std::string root_category);
  const std::string& root(std::string_view type) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  // Every type needs exactly one root, and every root must exist in the taxonomy.
  void validate(const TypeSystem& types, const TaxonomyGraph& taxonomy) const;

  // Reads `TYPE<TAB>root_category` lines; a type listed twice is a FormatError.
  static GammaMapping read_tsv(std::istream& in);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Entity id -> resolved category set C(e).
class EntityCatalog {
 public:
  void add(std::string entity, std::vector<CategoryId> categories);
  // nullptr when the entity is not in the catalog.
  const std::vector<CategoryId>* categories(std::string_view entity) const;
  std::size_t size() const { return entities_.size(); }
  std::size_t dropped_categories() const { return dropped_; }

  // JSON lines: {"id": string, "categories": [string]}. Category names that do
  // not resolve against the taxonomy are dropped and counted.
  static EntityCatalog read_jsonl(std::istream& in, const TaxonomyGraph& taxonomy);

 private:
  std::unordered_map<std::string, std::vector<CategoryId>> entities_;
  std::size_t dropped_ = 0;
};

// Result of resolving a category set to an entity type. type == nullopt is NT.
struct TypeInduction {
  std::optional<std::size_t> type;
  double probability = 0.0;
};

// Per-type descendant sets T↓(Γ(t)), computed once per type.
class TypeResolver {
 public:
  TypeResolver(const TypeSystem& types, const TaxonomyGraph& taxonomy, const GammaMapping& gamma);

  const TypeSystem& types() const { return *types_; }
  const TaxonomyGraph& taxonomy() const { return *taxonomy_; }
  bool under_type(CategoryId c, std::size_t type) const;

  // argmax over types of |{c in cats : c in T↓(Γ(t))}| / |cats|; ties go to the
  // earlier type, an all-zero count or an empty set yields NT with probability 0.
  TypeInduction induce(std::span<const CategoryId> cats) const;
  // Name-based variant; unknown names count in |cats| but match no type.
  TypeInduction induce(std::span<const std::string> cats) const;

 private:
  TypeInduction pick(std::span<const std::size_t> counts, std::size_t total) const;

  const TypeSystem* types_;
  const TaxonomyGraph* taxonomy_;
  std::vector<std::vector<bool>> members_;
};

inline TypeInduction induce_entity_type(std::span<const CategoryId> cats, const TypeResolver& resolver) {
  return resolver.induce(cats);
}

}  // namespace wltag
