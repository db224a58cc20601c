#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetact/backends.hpp"
#include "tweetact/types.hpp"

namespace tweetact {

// deficits[c] synthetic items to create for class c.
struct AugmentationPlan {
  std::vector<std::size_t> deficits;

  friend bool operator==(const AugmentationPlan&, const AugmentationPlan&) = default;
};

// deficit_c = max count - count_c. Throws kInvalidArgument on an empty
// distribution.
AugmentationPlan balance_plan(const ClassDistribution& distribution);

// {"<class>": deficit, ...} in taxonomy order.
std::string plan_to_json(const AugmentationPlan& plan, const Taxonomy& taxonomy);
AugmentationPlan plan_from_json(std::string_view json_text, const Taxonomy& taxonomy);

// Produces one synthetic token sequence from a source sequence.
class WordInserter {
 public:
  virtual ~WordInserter() = default;
  virtual std::vector<std::string> insert(std::span<const std::string> tokens,
                                          std::uint64_t seed) = 0;
};

// Inserts one word from stub_wordlist() at a seeded position.
// Throws kInvalidArgument on empty input.
std::vector<std::string> stub_insert(std::span<const std::string> tokens, std::uint64_t seed);

class StubInserter final : public WordInserter {
 public:
  std::vector<std::string> insert(std::span<const std::string> tokens, std::uint64_t seed) override {
    return stub_insert(tokens, seed);
  }
};

// Contextual insertion through a MaskFiller: a seeded slot position, then one
// of the filler's top_k candidates chosen by the same seed.
class MaskFillInserter final : public WordInserter {
 public:
  explicit MaskFillInserter(MaskFiller& filler, std::size_t top_k = 5)
      : filler_(filler), top_k_(top_k) {}
  std::vector<std::string> insert(std::span<const std::string> tokens, std::uint64_t seed) override;

 private:
  MaskFiller& filler_;
  std::size_t top_k_;
};

// Grows each class by its deficit. Sources of a class are a seeded shuffle
// of its items, cycled round-robin; item j of class c uses seed
// derive_seed(seed, c * 2^32 + j). A synthetic sequence equal to an existing
// one is retried once with a fresh seed, then kept. Originals come first,
// unchanged; synthetic rows follow grouped by class and carry source_id and
// id "<source>#aug<N>".
// Throws kPlanMismatch, kEmptyClass, kInserterFailure (with the source id).
LabeledDataset apply_plan(const LabeledDataset& dataset, const AugmentationPlan& plan,
                          WordInserter& inserter, std::uint64_t seed);

}  // namespace tweetact
