#include "tweetact/taxonomy.hpp"

#include <algorithm>
#include <set>

#include "tweetact/error.hpp"

namespace tweetact {

Taxonomy::Taxonomy(std::vector<std::string> names,
                   std::vector<std::pair<std::string, std::string>> aliases)
    : names_(std::move(names)), aliases_(std::move(aliases)) {
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) fail(ErrorKind::kInvalidConfig, "empty class name");
    if (!seen.insert(n).second) {
      fail(ErrorKind::kInvalidConfig, "duplicate class name '" + n + "'");
    }
  }
  for (const auto& [alias, target] : aliases_) {
    if (std::find(names_.begin(), names_.end(), target) == names_.end()) {
      fail(ErrorKind::kInvalidConfig,
           "alias '" + alias + "' targets unknown class '" + target + "'");
    }
  }
}

Taxonomy Taxonomy::speech_acts() {
  return Taxonomy({"Exp", "Que", "Req", "Ass", "Rec", "Oth"},
                  {{"Expression", "Exp"},
                   {"Question", "Que"},
                   {"Qus", "Que"},
                   {"Request", "Req"},
                   {"Assertion", "Ass"},
                   {"Recommendation", "Rec"},
                   {"Recommended", "Rec"},
                   {"Miscellaneous", "Oth"},
                   {"Mis", "Oth"},
                   {"Other", "Oth"}});
}

const std::string& Taxonomy::name(ClassIndex c) const {
  if (c.value >= names_.size()) {
    fail(ErrorKind::kUnknownLabel, "class index " + std::to_string(c.value) +
                                       " out of range");
  }
  return names_[c.value];
}

std::optional<ClassIndex> Taxonomy::find(std::string_view label) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == label) return ClassIndex{i};
  }
  for (const auto& [alias, target] : aliases_) {
    if (alias == label) return find(target);
  }
  return std::nullopt;
}

ClassIndex Taxonomy::index_of(std::string_view label) const {
  if (auto c = find(label)) return *c;
  fail(ErrorKind::kUnknownLabel, "label '" + std::string(label) +
                                     "' is not in the taxonomy");
}

Taxonomy parse_taxonomy_list(std::string_view comma_separated) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const auto end = comma_separated.find(',', start);
    auto piece = comma_separated.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    names.emplace_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return Taxonomy(std::move(names));
}

}  // namespace tweetact
