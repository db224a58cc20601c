#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tweetact/backends.hpp"
#include "tweetact/ensemble.hpp"
#include "tweetact/metrics.hpp"
#include "tweetact/types.hpp"

namespace fixtures {

// Counts from the arabertv02-Twitter / ASAD confusion matrix (rows gold).
inline constexpr std::uint64_t kReferenceCounts[6][6] = {
    {1873, 79, 95, 65, 64, 5}, {61, 985, 26, 8, 1, 0}, {48, 21, 407, 4, 11, 4},
    {75, 4, 6, 380, 5, 0},     {57, 3, 9, 7, 93, 0},   {28, 1, 7, 9, 0, 27}};

tweetact::ConfusionMatrix reference_confusion();

// 22,352 single-token items. Class c has 5 * support_c + 2 items, where
// support_c is a reference row sum, so a 20% stratum rounds back to it.
tweetact::LabeledDataset skewed_split_dataset();
std::vector<std::size_t> skewed_split_sizes();

// Classes sized proportionally to `ratios` * unit, every item with a unique
// three-word text.
tweetact::LabeledDataset ratio_dataset(const std::vector<std::size_t>& ratios, std::size_t unit);

// M matrices over `rows` ids and six classes, rows drawn as normalized
// uniform vectors, ids "r0" ... in the same order for every model.
std::vector<tweetact::ProbabilityMatrix> random_matrices(std::uint64_t seed, std::size_t models,
                                                         std::size_t rows);

// Synthetic vote file with exactly known per-stage counts.
struct VoteFixture {
  std::vector<tweetact::RawTweet> tweets;
  std::size_t excluded = 0;       // three distinct votes
  std::size_t short_texts = 0;    // normalize to fewer than three words
  std::vector<std::size_t> class_sizes;  // surviving items per class
  std::vector<std::size_t> test_sizes;   // 20% strata
};
VoteFixture vote_fixture_1000();

// Writes tweets as JSONL with votes only (no labels).
void write_vote_fixture(const std::string& path, const VoteFixture& fixture);

// p(class 0) = high when `word` is among the text's tokens, else low; the
// rest of the mass goes to class 1.
class IndicatorBackend final : public tweetact::ClassifierBackend {
 public:
  IndicatorBackend(tweetact::Taxonomy taxonomy, std::string word, double high, double low);
  const std::string& model_id() const override { return id_; }
  tweetact::ProbabilityMatrix classify_batch(std::span<const tweetact::TextItem> items) override;
  std::size_t calls() const { return calls_; }

 private:
  tweetact::Taxonomy taxonomy_;
  std::string word_;
  double high_;
  double low_;
  std::string id_ = "indicator";
  std::size_t calls_ = 0;
};

// The same row for every text.
class ConstantBackend final : public tweetact::ClassifierBackend {
 public:
  ConstantBackend(tweetact::Taxonomy taxonomy, std::vector<double> row);
  const std::string& model_id() const override { return id_; }
  tweetact::ProbabilityMatrix classify_batch(std::span<const tweetact::TextItem> items) override;

 private:
  tweetact::Taxonomy taxonomy_;
  std::vector<double> row_;
  std::string id_ = "constant";
};

}  // namespace fixtures
