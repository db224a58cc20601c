#include "tweetact/augment.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tweetact/dataset.hpp"
#include "tweetact/error.hpp"
#include "tweetact/rng.hpp"

namespace tweetact {
namespace {

using json = nlohmann::json;

std::string key_of(std::span<const std::string> tokens) {
  std::string key;
  for (const auto& t : tokens) {
    key += t;
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace

AugmentationPlan balance_plan(const ClassDistribution& distribution) {
  if (distribution.total == 0 || distribution.counts.empty()) {
    fail(ErrorKind::kInvalidArgument, "cannot plan augmentation for an empty dataset");
  }
  const std::size_t largest =
      *std::max_element(distribution.counts.begin(), distribution.counts.end());
  AugmentationPlan plan;
  plan.deficits.reserve(distribution.counts.size());
  for (auto n : distribution.counts) plan.deficits.push_back(largest - n);
  return plan;
}

std::string plan_to_json(const AugmentationPlan& plan, const Taxonomy& taxonomy) {
  if (plan.deficits.size() != taxonomy.size()) {
    fail(ErrorKind::kPlanMismatch, "plan has " + std::to_string(plan.deficits.size()) +
                                       " classes, taxonomy has " + std::to_string(taxonomy.size()));
  }
  // nlohmann::json sorts object keys; taxonomy order is written by hand.
  std::string out = "{";
  for (std::size_t c = 0; c < taxonomy.size(); ++c) {
    if (c) out += ", ";
    out += json(taxonomy.names()[c]).dump() + ": " + std::to_string(plan.deficits[c]);
  }
  out += "}\n";
  return out;
}

AugmentationPlan plan_from_json(std::string_view json_text, const Taxonomy& taxonomy) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("augmentation plan: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, "augmentation plan must be an object");
  AugmentationPlan plan;
  plan.deficits.assign(taxonomy.size(), 0);
  std::vector<bool> seen(taxonomy.size(), false);
  for (const auto& [name, value] : doc.items()) {
    const ClassIndex c = taxonomy.index_of(name);
    if (!value.is_number_unsigned()) {
      fail(ErrorKind::kParse, "deficit for '" + name + "' must be a non-negative integer");
    }
    plan.deficits[c.value] = value.get<std::size_t>();
    seen[c.value] = true;
  }
  for (std::size_t c = 0; c < taxonomy.size(); ++c) {
    if (!seen[c]) fail(ErrorKind::kPlanMismatch, "plan has no entry for '" + taxonomy.names()[c] + "'");
  }
  return plan;
}

std::vector<std::string> stub_insert(std::span<const std::string> tokens, std::uint64_t seed) {
  if (tokens.empty()) fail(ErrorKind::kInvalidArgument, "stub_insert needs at least one token");
  Rng rng(seed);
  const auto position = static_cast<std::size_t>(rng.uniform(tokens.size() + 1));
  const auto words = stub_wordlist();
  const auto& word = words[static_cast<std::size_t>(rng.uniform(words.size()))];
  std::vector<std::string> out;
  out.reserve(tokens.size() + 1);
  out.insert(out.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(position));
  out.emplace_back(word);
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(position), tokens.end());
  return out;
}

std::vector<std::string> MaskFillInserter::insert(std::span<const std::string> tokens,
                                                  std::uint64_t seed) {
  if (tokens.empty()) fail(ErrorKind::kInvalidArgument, "insertion needs at least one token");
  Rng rng(seed);
  const auto position = static_cast<std::size_t>(rng.uniform(tokens.size() + 1));
  const auto candidates = filler_.fill_mask(tokens, position, top_k_);
  if (candidates.empty()) fail(ErrorKind::kMalformedResponse, "mask filler returned no candidates");
  const auto& word = candidates[static_cast<std::size_t>(rng.uniform(candidates.size()))];
  std::vector<std::string> out(tokens.begin(), tokens.end());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(position), word);
  return out;
}

LabeledDataset apply_plan(const LabeledDataset& dataset, const AugmentationPlan& plan,
                          WordInserter& inserter, std::uint64_t seed) {
  const std::size_t num_classes = dataset.taxonomy.size();
  if (plan.deficits.size() != num_classes) {
    fail(ErrorKind::kPlanMismatch, "plan has " + std::to_string(plan.deficits.size()) +
                                       " classes, dataset has " + std::to_string(num_classes));
  }
  const auto dist = class_distribution(dataset);
  std::optional<std::size_t> target;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t after = dist.counts[c] + plan.deficits[c];
    if (!target) target = after;
    if (after != *target) {
      fail(ErrorKind::kPlanMismatch, "plan does not bring every class to the same size (class '" +
                                         dataset.taxonomy.names()[c] + "' ends at " +
                                         std::to_string(after) + ", expected " +
                                         std::to_string(*target) + ")");
    }
  }

  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    members[dataset.items[i].label.value].push_back(i);
  }

  LabeledDataset out = dataset;
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> texts;
  for (const auto& item : dataset.items) {
    ids.insert(item.id);
    texts.insert(key_of(item.tokens));
  }
  std::unordered_map<std::string, std::size_t> per_source;

  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t deficit = plan.deficits[c];
    if (deficit == 0) continue;
    auto sources = members[c];
    if (sources.empty()) {
      fail(ErrorKind::kEmptyClass, "class '" + dataset.taxonomy.names()[c] +
                                       "' needs " + std::to_string(deficit) +
                                       " synthetic items but has no source items");
    }
    Rng order_rng(derive_seed(seed, (std::uint64_t{1} << 63) | c));
    order_rng.shuffle(std::span<std::size_t>(sources));

    for (std::size_t j = 0; j < deficit; ++j) {
      const LabeledItem& source = dataset.items[sources[j % sources.size()]];
      const std::uint64_t item_seed = derive_seed(seed, (std::uint64_t{c} << 32) | j);
      std::vector<std::string> tokens;
      try {
        tokens = inserter.insert(source.tokens, item_seed);
        if (texts.count(key_of(tokens)) != 0) {
          tokens = inserter.insert(source.tokens, derive_seed(item_seed, 1));
        }
      } catch (const std::exception& e) {
        fail(ErrorKind::kInserterFailure, "source '" + source.id + "': " + e.what());
      }
      if (tokens.empty()) {
        fail(ErrorKind::kInserterFailure, "source '" + source.id + "': inserter returned no tokens");
      }

      std::size_t& n = per_source[source.id];
      std::string id;
      do {
        id = source.id + "#aug" + std::to_string(++n);
      } while (ids.count(id) != 0);
      ids.insert(id);
      texts.insert(key_of(tokens));
      out.items.push_back({std::move(id), std::move(tokens), source.label, source.id});
    }
  }
  return out;
}

}  // namespace tweetact
