#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tweetact/taxonomy.hpp"

namespace tweetact {

// A tweet as read from disk. `votes` is empty when the row carries none.
struct RawTweet {
  std::string id;
  std::string text;
  std::vector<std::string> votes;
  std::optional<std::string> label;
};

struct NormalizedTweet {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> label;
  std::vector<std::string> votes;
};

struct LabeledItem {
  std::string id;
  std::vector<std::string> tokens;
  ClassIndex label;
  // Set on synthetic (augmented) rows only.
  std::optional<std::string> source_id;

  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

struct LabeledDataset {
  Taxonomy taxonomy;
  std::vector<LabeledItem> items;
};

struct ClassDistribution {
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

}  // namespace tweetact
