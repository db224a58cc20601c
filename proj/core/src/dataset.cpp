#include "tweetact/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "tweetact/error.hpp"
#include "tweetact/rng.hpp"

namespace tweetact {
namespace {

void check_unique_ids(std::span<const RawTweet> tweets) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (!ids.insert(t.id).second) {
      fail(ErrorKind::kDuplicateId, "tweet id '" + t.id + "' appears more than once");
    }
  }
}

// Tolerates representation error such as 0.3 * 5 = 1.4999999999999998.
constexpr double kRoundingSlack = 1e-9;

}  // namespace

std::optional<ClassIndex> adjudicate(std::span<const std::string> votes,
                                     const Taxonomy& taxonomy) {
  if (votes.size() != 3) {
    fail(ErrorKind::kMissingVotes,
         "expected 3 votes, got " + std::to_string(votes.size()));
  }
  const ClassIndex a = taxonomy.index_of(votes[0]);
  const ClassIndex b = taxonomy.index_of(votes[1]);
  const ClassIndex c = taxonomy.index_of(votes[2]);
  if (a == b || a == c) return a;
  if (b == c) return b;
  return std::nullopt;
}

AdjudicationResult adjudicate_dataset(std::span<const RawTweet> tweets,
                                      const Taxonomy& taxonomy) {
  check_unique_ids(tweets);
  AdjudicationResult result;
  result.report.counts.counts.assign(taxonomy.size(), 0);
  for (const auto& tweet : tweets) {
    if (tweet.votes.size() != 3) {
      fail(ErrorKind::kMissingVotes, "tweet '" + tweet.id + "' has " +
                                         std::to_string(tweet.votes.size()) +
                                         " votes, expected 3");
    }
    std::optional<ClassIndex> label;
    try {
      label = adjudicate(tweet.votes, taxonomy);
    } catch (const Error& e) {
      fail(e.kind(), "tweet '" + tweet.id + "': " + e.what());
    }
    if (!label) {
      result.report.excluded_ids.push_back(tweet.id);
      continue;
    }
    RawTweet kept = tweet;
    kept.label = taxonomy.name(*label);
    result.tweets.push_back(std::move(kept));
    ++result.report.counts.counts[label->value];
    ++result.report.counts.total;
  }
  return result;
}

LabeledDataset make_labeled_dataset(const Taxonomy& taxonomy,
                                    std::span<const NormalizedTweet> tweets) {
  LabeledDataset out{taxonomy, {}};
  out.items.reserve(tweets.size());
  std::unordered_set<std::string_view> ids;
  for (const auto& t : tweets) {
    if (!t.label) fail(ErrorKind::kUnknownLabel, "tweet '" + t.id + "' has no label");
    if (!ids.insert(t.id).second) {
      fail(ErrorKind::kDuplicateId, "tweet id '" + t.id + "' appears more than once");
    }
    ClassIndex label;
    try {
      label = taxonomy.index_of(*t.label);
    } catch (const Error& e) {
      fail(e.kind(), "tweet '" + t.id + "': " + e.what());
    }
    out.items.push_back({t.id, t.tokens, label, std::nullopt});
  }
  return out;
}

ClassDistribution class_distribution(const LabeledDataset& dataset) {
  ClassDistribution d;
  d.counts.assign(dataset.taxonomy.size(), 0);
  for (const auto& item : dataset.items) {
    if (item.label.value >= d.counts.size()) {
      fail(ErrorKind::kUnknownLabel, "item '" + item.id + "' has an out-of-range label");
    }
    ++d.counts[item.label.value];
  }
  d.total = dataset.items.size();
  return d;
}

LabeledDataset merge_classes(const LabeledDataset& dataset,
                             const std::map<std::string, std::string>& merge_map) {
  const auto& old_names = dataset.taxonomy.names();
  for (const auto& [from, to] : merge_map) {
    if (std::find(old_names.begin(), old_names.end(), from) == old_names.end()) {
      fail(ErrorKind::kUnknownLabel, "merge map key '" + from + "' is not a class");
    }
    if (to.empty()) fail(ErrorKind::kInvalidConfig, "merge map image for '" + from + "' is empty");
  }

  std::vector<std::string> new_names;
  std::vector<std::size_t> remap(old_names.size());
  for (std::size_t i = 0; i < old_names.size(); ++i) {
    auto it = merge_map.find(old_names[i]);
    if (it == merge_map.end()) {
      fail(ErrorKind::kUnknownLabel, "merge map has no entry for class '" + old_names[i] + "'");
    }
    auto pos = std::find(new_names.begin(), new_names.end(), it->second);
    if (pos == new_names.end()) {
      new_names.push_back(it->second);
      pos = new_names.end() - 1;
    }
    remap[i] = static_cast<std::size_t>(pos - new_names.begin());
  }

  // Aliases survive when their target survives under the same name.
  std::vector<std::pair<std::string, std::string>> aliases;
  for (const auto& alias : dataset.taxonomy.aliases()) {
    if (std::find(new_names.begin(), new_names.end(), alias.second) != new_names.end()) {
      aliases.push_back(alias);
    }
  }

  LabeledDataset out{Taxonomy(std::move(new_names), std::move(aliases)), dataset.items};
  for (auto& item : out.items) item.label = ClassIndex{remap.at(item.label.value)};
  return out;
}

std::size_t stratum_test_count(std::size_t class_size, double test_ratio) {
  if (class_size <= 1) return 0;
  const auto rounded = static_cast<std::size_t>(
      std::floor(test_ratio * static_cast<double>(class_size) + 0.5 + kRoundingSlack));
  return std::min(rounded, class_size - 1);
}

SplitResult stratified_split(const LabeledDataset& dataset, const SplitOptions& options) {
  if (!(options.test_ratio > 0.0 && options.test_ratio < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "test_ratio must lie in (0, 1)");
  }
  const std::size_t num_classes = dataset.taxonomy.size();
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const auto c = dataset.items[i].label.value;
    if (c >= num_classes) {
      fail(ErrorKind::kUnknownLabel, "item '" + dataset.items[i].id + "' has an out-of-range label");
    }
    members[c].push_back(i);
  }

  SplitResult result;
  result.seed = options.seed;
  result.test_ratio = options.test_ratio;
  result.test_counts.assign(num_classes, 0);
  result.train_counts.assign(num_classes, 0);

  for (std::size_t c = 0; c < num_classes; ++c) {
    if (members[c].empty()) {
      result.notices.push_back("EmptyClass: class '" + dataset.taxonomy.names()[c] +
                               "' has no items and was skipped");
      continue;
    }
    result.test_counts[c] = stratum_test_count(members[c].size(), options.test_ratio);
  }

  if (options.exact_total) {
    const double target_real = options.test_ratio * static_cast<double>(dataset.items.size());
    const auto target = static_cast<std::size_t>(std::floor(target_real + 0.5 + kRoundingSlack));
    std::vector<double> remainder(num_classes, -1.0);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      const std::size_t n = members[c].size();
      if (n <= 1) {
        result.test_counts[c] = 0;
        continue;
      }
      const double exact = options.test_ratio * static_cast<double>(n);
      const auto base = std::min(static_cast<std::size_t>(std::floor(exact + kRoundingSlack)), n - 1);
      result.test_counts[c] = base;
      remainder[c] = exact - static_cast<double>(base);
      assigned += base;
    }
    std::vector<std::size_t> order(num_classes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t c : order) {
      if (assigned >= target) break;
      if (remainder[c] < 0.0 || result.test_counts[c] + 1 >= members[c].size()) continue;
      ++result.test_counts[c];
      ++assigned;
    }
  }

  Rng rng(options.seed);
  std::vector<char> in_test(dataset.items.size(), 0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& m = members[c];
    if (m.empty()) continue;
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t k = 0; k < result.test_counts[c]; ++k) in_test[m[k]] = 1;
    result.train_counts[c] = m.size() - result.test_counts[c];
  }

  result.train.taxonomy = dataset.taxonomy;
  result.test.taxonomy = dataset.taxonomy;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    (in_test[i] ? result.test : result.train).items.push_back(dataset.items[i]);
  }
  return result;
}

}  // namespace tweetact
