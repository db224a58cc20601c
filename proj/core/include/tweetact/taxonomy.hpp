#pragma once

#include <cstddef>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tweetact {

// Index of a class within a Taxonomy. Column order of probability matrices
// and argmax tie-breaking both follow this index.
struct ClassIndex {
  std::size_t value = 0;

  friend auto operator<=>(const ClassIndex&, const ClassIndex&) = default;
};

// Ordered, duplicate-free list of class names. Aliases map alternative
// spellings (e.g. "Expression" for "Exp") onto a class; they never change
// the canonical name written to output files.
class Taxonomy {
 public:
  Taxonomy() = default;
  explicit Taxonomy(std::vector<std::string> names,
                    std::vector<std::pair<std::string, std::string>> aliases = {});

  // Exp, Que, Req, Ass, Rec, Oth with the long names as aliases.
  static Taxonomy speech_acts();

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(ClassIndex c) const;

  std::optional<ClassIndex> find(std::string_view label) const;
  // Throws Error(kUnknownLabel).
  ClassIndex index_of(std::string_view label) const;

  const std::vector<std::pair<std::string, std::string>>& aliases() const {
    return aliases_;
  }

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::pair<std::string, std::string>> aliases_;
};

// Parses "Exp,Que,Req" into a Taxonomy (no aliases). Spaces around names
// are dropped.
Taxonomy parse_taxonomy_list(std::string_view comma_separated);

}  // namespace tweetact
