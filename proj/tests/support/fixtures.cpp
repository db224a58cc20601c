#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "tweetact/io.hpp"
#include "tweetact/rng.hpp"

namespace fixtures {

using namespace tweetact;

ConfusionMatrix reference_confusion() {
  std::vector<std::uint64_t> cells;
  for (const auto& row : kReferenceCounts) cells.insert(cells.end(), std::begin(row), std::end(row));
  return ConfusionMatrix(Taxonomy::speech_acts(), cells);
}

std::vector<std::size_t> skewed_split_sizes() {
  std::vector<std::size_t> sizes;
  for (const auto& row : kReferenceCounts) {
    const auto support = std::accumulate(std::begin(row), std::end(row), std::uint64_t{0});
    sizes.push_back(static_cast<std::size_t>(5 * support + 2));
  }
  return sizes;
}

LabeledDataset skewed_split_dataset() {
  LabeledDataset ds{Taxonomy::speech_acts(), {}};
  const auto sizes = skewed_split_sizes();
  // Interleave classes so input order is not grouped by label.
  std::vector<std::size_t> left = sizes;
  std::size_t n = 0;
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t c = 0; c < left.size(); ++c) {
      const std::size_t take = std::min<std::size_t>(left[c], c + 1);
      for (std::size_t k = 0; k < take; ++k) {
        ds.items.push_back({"s" + std::to_string(n++), {"كلمه"}, ClassIndex{c}, std::nullopt});
      }
      left[c] -= take;
      any = any || left[c] > 0;
    }
  }
  return ds;
}

namespace {

const std::vector<std::string>& arabic_words() {
  static const std::vector<std::string> words = {
      "كتاب", "جميل", "اليوم", "الطقس", "رائع", "هل",    "انت",   "ذاهب",  "الي",
      "المدرسه", "من",  "فضلك",  "ساعدني", "شكرا", "كيف",  "حالك",  "نعم",   "لا",
      "الحمد", "لله",  "مبروك", "عاجل",  "خبر",  "انصح", "بزياره", "المطعم", "ارجو",
      "الرد",  "متي",  "الموعد", "سعيد",  "حزين", "الوطن", "الفريق", "فاز",   "المباراه"};
  return words;
}

std::string word_text(Rng& rng, std::size_t count) {
  const auto& words = arabic_words();
  std::string out;
  for (std::size_t k = 0; k < count; ++k) {
    if (k) out += ' ';
    out += words[rng.uniform(words.size())];
  }
  return out;
}

}  // namespace

LabeledDataset ratio_dataset(const std::vector<std::size_t>& ratios, std::size_t unit) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < ratios.size(); ++c) names.push_back("C" + std::to_string(c));
  LabeledDataset ds{Taxonomy(names), {}};
  const auto& words = arabic_words();
  std::size_t n = 0;
  for (std::size_t c = 0; c < ratios.size(); ++c) {
    for (std::size_t k = 0; k < ratios[c] * unit; ++k, ++n) {
      // Three distinct words, unique per n for n < 36^3.
      const std::size_t a = n % words.size();
      const std::size_t b = (n / words.size()) % words.size();
      const std::size_t d = (n / (words.size() * words.size())) % words.size();
      ds.items.push_back({"i" + std::to_string(n), {words[a], words[b], words[d]}, ClassIndex{c},
                          std::nullopt});
    }
  }
  return ds;
}

std::vector<ProbabilityMatrix> random_matrices(std::uint64_t seed, std::size_t models,
                                               std::size_t rows) {
  Rng rng(seed);
  const auto names = Taxonomy::speech_acts().names();
  std::vector<ProbabilityMatrix> out;
  for (std::size_t m = 0; m < models; ++m) {
    ProbabilityMatrix pm("model" + std::to_string(m), names);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> row(names.size());
      double sum = 0.0;
      for (auto& v : row) sum += (v = rng.uniform01() + 1e-3);
      for (auto& v : row) v /= sum;
      pm.add_row("r" + std::to_string(i), row);
    }
    out.push_back(std::move(pm));
  }
  return out;
}

VoteFixture vote_fixture_1000() {
  const Taxonomy tax = Taxonomy::speech_acts();
  // Alternate spellings annotators used, cycled through the votes.
  const std::vector<std::vector<std::string>> spellings = {
      {"Exp", "Expression"}, {"Que", "Question", "Qus"}, {"Req", "Request"},
      {"Ass", "Assertion"},  {"Rec", "Recommendation"},  {"Oth", "Other", "Mis"}};
  const std::vector<std::string> decorations = {
      "", " @user_1", " http://t.co/abc", " #الوطن", " 😀", " جمييييل", " كَتَبَ", " 2020", "؟",
      "!"};

  VoteFixture fx;
  fx.class_sizes = {400, 200, 100, 90, 60, 30};
  fx.excluded = 70;
  fx.short_texts = 50;
  for (std::size_t n : fx.class_sizes) fx.test_sizes.push_back(static_cast<std::size_t>(0.2 * n + 0.5));

  Rng rng(20240501);
  auto spell = [&](std::size_t c, std::size_t k) {
    return spellings[c][k % spellings[c].size()];
  };
  auto other_class = [&](std::size_t c) {
    return (c + 1 + rng.uniform(tax.size() - 1)) % tax.size();
  };

  std::vector<RawTweet> tweets;
  std::size_t k = 0;
  for (std::size_t c = 0; c < fx.class_sizes.size(); ++c) {
    for (std::size_t j = 0; j < fx.class_sizes[c]; ++j, ++k) {
      RawTweet t;
      t.text = word_text(rng, 3 + rng.uniform(6)) + decorations[k % decorations.size()];
      const std::size_t x = other_class(c);
      switch (k % 4) {
        case 0: t.votes = {spell(c, k), spell(c, k + 1), spell(c, k + 2)}; break;
        case 1: t.votes = {spell(c, k), spell(c, k + 1), spell(x, k)}; break;
        case 2: t.votes = {spell(c, k), spell(x, k), spell(c, k + 1)}; break;
        default: t.votes = {spell(x, k), spell(c, k), spell(c, k + 1)}; break;
      }
      tweets.push_back(std::move(t));
    }
  }
  for (std::size_t j = 0; j < fx.excluded; ++j, ++k) {
    RawTweet t;
    t.text = word_text(rng, 4);
    const std::size_t a = j % tax.size();
    const std::size_t b = (a + 1 + j % (tax.size() - 1)) % tax.size();
    std::size_t c = (b + 1) % tax.size();
    if (c == a) c = (c + 1) % tax.size();
    t.votes = {spell(a, j), spell(b, j), spell(c, j)};
    tweets.push_back(std::move(t));
  }
  for (std::size_t j = 0; j < fx.short_texts; ++j, ++k) {
    RawTweet t;
    // Two Arabic words survive; digits, Latin and emoji are scrubbed.
    t.text = word_text(rng, 2) + " 123 hello 😀";
    const std::size_t c = j % tax.size();
    t.votes = {spell(c, j), spell(c, j), spell(c, j + 1)};
    tweets.push_back(std::move(t));
  }

  std::vector<std::size_t> order(tweets.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto t = tweets[order[i]];
    char id[24];
    std::snprintf(id, sizeof id, "v%04zu", i);
    t.id = id;
    fx.tweets.push_back(std::move(t));
  }
  return fx;
}

void write_vote_fixture(const std::string& path, const VoteFixture& fixture) {
  write_tweets_jsonl(path, fixture.tweets);
}

IndicatorBackend::IndicatorBackend(Taxonomy taxonomy, std::string word, double high, double low)
    : taxonomy_(std::move(taxonomy)), word_(std::move(word)), high_(high), low_(low) {}

ProbabilityMatrix IndicatorBackend::classify_batch(std::span<const TextItem> items) {
  ++calls_;
  ProbabilityMatrix out(id_, taxonomy_.names());
  std::vector<double> row(taxonomy_.size(), 0.0);
  for (const auto& item : items) {
    const auto tokens = split_whitespace(item.text);
    const bool present = std::find(tokens.begin(), tokens.end(), word_) != tokens.end();
    row[0] = present ? high_ : low_;
    row[1] = 1.0 - row[0];
    out.add_row(item.id, row);
  }
  return out;
}

ConstantBackend::ConstantBackend(Taxonomy taxonomy, std::vector<double> row)
    : taxonomy_(std::move(taxonomy)), row_(std::move(row)) {}

ProbabilityMatrix ConstantBackend::classify_batch(std::span<const TextItem> items) {
  ProbabilityMatrix out(id_, taxonomy_.names());
  for (const auto& item : items) out.add_row(item.id, row_);
  return out;
}

}  // namespace fixtures
