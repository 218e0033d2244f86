#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wltag {

// Dense label index. Values [0, num_labels()) are the BIO inventory; the
// three weak-only labels follow (UN, B-NT, I-NT).
using LabelId = int;

// Entity types and the label inventories derived from them.
//
// Layout: O = 0, B-t = 1 + 2t, I-t = 2 + 2t, then UN, B-NT, I-NT.
class TypeSystem {
 public:
  TypeSystem() = default;

  // Throws ConfigError on an empty or duplicated list.
  static TypeSystem build(std::vector<std::string> types);

  std::size_t num_types() const { return types_.size(); }
  std::size_t num_labels() const { return 2 * types_.size() + 1; }
  std::size_t num_weak_labels() const { return num_labels() + 3; }

  const std::vector<std::string>& types() const { return types_; }
  const std::string& type_name(std::size_t t) const { return types_.at(t); }
  std::optional<std::size_t> find_type(std::string_view name) const;

  static constexpr LabelId outside() { return 0; }
  static constexpr LabelId begin(std::size_t t) { return static_cast<LabelId>(1 + 2 * t); }
  static constexpr LabelId inside(std::size_t t) { return static_cast<LabelId>(2 + 2 * t); }
  LabelId unlabeled() const { return static_cast<LabelId>(num_labels()); }
  LabelId begin_untyped() const { return static_cast<LabelId>(num_labels() + 1); }
  LabelId inside_untyped() const { return static_cast<LabelId>(num_labels() + 2); }

  // True for members of Y (the BIO inventory).
  bool is_typed(LabelId y) const { return y >= 0 && y < static_cast<LabelId>(num_labels()); }
  bool is_weak(LabelId y) const {
    return y >= 0 && y < static_cast<LabelId>(num_weak_labels());
  }

  // Entity type of a B-t/I-t label; nullopt for O and weak-only labels.
  std::optional<std::size_t> type_of(LabelId y) const;
  // Meaningful for typed labels only.
  static bool is_begin(LabelId y) { return y > 0 && (y % 2) == 1; }

  const std::string& label_name(LabelId y) const { return names_.at(static_cast<std::size_t>(y)); }
  // Searches the weak inventory Ỹ (which contains Y).
  std::optional<LabelId> find_label(std::string_view name) const;
  // Throws LookupError for unknown names.
  LabelId label(std::string_view name) const;

  bool operator==(const TypeSystem& other) const { return types_ == other.types_; }

 private:
  std::vector<std::string> types_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> index_;
};

}  // namespace wltag
