#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweetact/types.hpp"

namespace tweetact {

// Majority vote over three annotator labels. nullopt means the tweet is
// excluded (all three votes differ). Throws kUnknownLabel.
std::optional<ClassIndex> adjudicate(std::span<const std::string> votes,
                                     const Taxonomy& taxonomy);

struct AdjudicationReport {
  std::vector<std::string> excluded_ids;
  ClassDistribution counts;
};

struct AdjudicationResult {
  // Retained tweets with `label` set to the canonical class name.
  std::vector<RawTweet> tweets;
  AdjudicationReport report;
};

// Adjudicates raw tweets (adjudication precedes normalization in the
// pipeline). Throws kMissingVotes, kUnknownLabel, kDuplicateId.
AdjudicationResult adjudicate_dataset(std::span<const RawTweet> tweets,
                                      const Taxonomy& taxonomy);

// Resolves string labels against the taxonomy. Throws kUnknownLabel when a
// label is missing or unknown and kDuplicateId on repeated ids.
LabeledDataset make_labeled_dataset(const Taxonomy& taxonomy,
                                    std::span<const NormalizedTweet> tweets);

ClassDistribution class_distribution(const LabeledDataset& dataset);

// Relabels every item through `merge_map` (old name -> new name). The new
// taxonomy lists images in order of first appearance over the old order.
// Throws kUnknownLabel for an unmapped class or a key outside the taxonomy.
LabeledDataset merge_classes(const LabeledDataset& dataset,
                             const std::map<std::string, std::string>& merge_map);

struct SplitOptions {
  double test_ratio = 0.2;
  std::uint64_t seed = 42;
  // Adjust per-class counts (largest remainder) so the overall test size is
  // round(test_ratio * N). Off by default: plain per-class rounding.
  bool exact_total = false;
};

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
  std::uint64_t seed = 0;
  double test_ratio = 0.0;
  std::vector<std::size_t> test_counts;
  std::vector<std::size_t> train_counts;
  // One entry per class that had no items (the class is skipped).
  std::vector<std::string> notices;
};

// Per-class test size: round-half-up of ratio*n, capped at n-1 so each
// non-empty class keeps at least one training item.
std::size_t stratum_test_count(std::size_t class_size, double test_ratio);

// Stratified split. Each class's items (in input order) are shuffled with
// one Rng(seed) stream, visited in taxonomy order; the first k go to test.
// Output keeps input order within train and within test.
SplitResult stratified_split(const LabeledDataset& dataset, const SplitOptions& options = {});

}  // namespace tweetact
