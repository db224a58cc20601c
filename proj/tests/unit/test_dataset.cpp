#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "tweetact/dataset.hpp"
#include "tweetact/error.hpp"
#include "tweetact/normalize.hpp"

using namespace tweetact;

namespace {

const Taxonomy kTax = Taxonomy::speech_acts();

std::optional<std::string> adj(std::vector<std::string> v) {
  const auto r = adjudicate(v, kTax);
  if (!r) return std::nullopt;
  return kTax.name(*r);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

LabeledDataset small_dataset(const std::vector<std::size_t>& labels) {
  LabeledDataset ds{kTax, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ds.items.push_back({"x" + std::to_string(i), {"كلمه"}, ClassIndex{labels[i]}, std::nullopt});
  }
  return ds;
}

}  // namespace

TEST(Adjudicate, MajorityAndUnanimity) {
  EXPECT_EQ(adj({"Exp", "Exp", "Que"}), "Exp");
  EXPECT_EQ(adj({"Exp", "Exp", "Exp"}), "Exp");
  EXPECT_EQ(adj({"Que", "Exp", "Que"}), "Que");
  EXPECT_EQ(adj({"Expression", "Exp", "Que"}), "Exp");
}

TEST(Adjudicate, ThreeWaySplitExcluded) {
  EXPECT_EQ(adj({"Exp", "Que", "Req"}), std::nullopt);
}

TEST(Adjudicate, VoteOrderInvariant) {
  const auto& names = kTax.names();
  for (const auto& a : names)
    for (const auto& b : names)
      for (const auto& c : names) {
        std::vector<std::string> v = {a, b, c};
        std::sort(v.begin(), v.end());
        const auto expected = adj(v);
        do {
          EXPECT_EQ(adj(v), expected);
        } while (std::next_permutation(v.begin(), v.end()));
      }
}

TEST(Adjudicate, Errors) {
  EXPECT_EQ(kind_of([] { adj({"Exp", "Sarcasm", "Exp"}); }), ErrorKind::kUnknownLabel);
  EXPECT_EQ(kind_of([] { adj({"Exp", "Exp"}); }), ErrorKind::kMissingVotes);
}

TEST(AdjudicateDataset, FiveTweetsOneExcluded) {
  std::vector<RawTweet> tweets;
  const std::vector<std::vector<std::string>> votes = {{"Exp", "Exp", "Que"},
                                                       {"Que", "Que", "Que"},
                                                       {"Exp", "Que", "Req"},
                                                       {"Req", "Ass", "Req"},
                                                       {"Rec", "Oth", "Oth"}};
  for (std::size_t i = 0; i < votes.size(); ++i) {
    tweets.push_back({"t" + std::to_string(i), "نص", votes[i], std::nullopt});
  }
  const auto result = adjudicate_dataset(tweets, kTax);
  ASSERT_EQ(result.tweets.size(), 4u);
  EXPECT_EQ(result.report.excluded_ids, std::vector<std::string>{"t2"});
  EXPECT_EQ(result.tweets[3].label, std::optional<std::string>("Oth"));
  EXPECT_EQ(result.report.counts.counts, (std::vector<std::size_t>{1, 1, 1, 0, 0, 1}));
  EXPECT_EQ(result.report.counts.total, 4u);
}

TEST(AdjudicateDataset, MissingVotesNamesTweet) {
  std::vector<RawTweet> tweets = {{"bad", "نص", {"Exp"}, std::nullopt}};
  try {
    adjudicate_dataset(tweets, kTax);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingVotes);
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
}

TEST(AdjudicateDataset, VoteFixtureRetainsKnownCount) {
  const auto fx = fixtures::vote_fixture_1000();
  ASSERT_EQ(fx.tweets.size(), 1000u);
  const auto result = adjudicate_dataset(fx.tweets, kTax);
  const std::size_t valid = std::accumulate(fx.class_sizes.begin(), fx.class_sizes.end(),
                                            fx.short_texts);
  EXPECT_EQ(result.tweets.size(), valid);
  EXPECT_EQ(result.report.excluded_ids.size(), fx.excluded);
}

TEST(ClassDistribution, EmptyAndConservation) {
  const auto empty = class_distribution(LabeledDataset{kTax, {}});
  EXPECT_EQ(empty.counts, std::vector<std::size_t>(6, 0));
  EXPECT_EQ(empty.total, 0u);
  const auto d = class_distribution(small_dataset({0, 0, 1, 5, 5, 5}));
  EXPECT_EQ(d.counts, (std::vector<std::size_t>{2, 1, 0, 0, 0, 3}));
  EXPECT_EQ(d.total, 6u);
}

TEST(ClassDistribution, ReferenceTestSupports) {
  LabeledDataset ds{kTax, {}};
  for (std::size_t g = 0; g < 6; ++g) {
    const auto n = std::accumulate(std::begin(fixtures::kReferenceCounts[g]),
                                   std::end(fixtures::kReferenceCounts[g]), std::uint64_t{0});
    for (std::uint64_t k = 0; k < n; ++k) {
      ds.items.push_back({std::to_string(g) + "-" + std::to_string(k), {"ك"}, ClassIndex{g}, {}});
    }
  }
  const auto d = class_distribution(ds);
  EXPECT_EQ(d.counts, (std::vector<std::size_t>{2181, 1081, 495, 470, 169, 72}));
  EXPECT_EQ(d.total, 4468u);
}

TEST(MergeClasses, RecommendationIntoOther) {
  const auto ds = small_dataset({0, 1, 2, 3, 4, 4, 5});
  std::map<std::string, std::string> m;
  for (const auto& n : kTax.names()) m[n] = n;
  m["Rec"] = "Oth";
  const auto merged = merge_classes(ds, m);
  EXPECT_EQ(merged.taxonomy.names(), (std::vector<std::string>{"Exp", "Que", "Req", "Ass", "Oth"}));
  const auto d = class_distribution(merged);
  EXPECT_EQ(d.counts, (std::vector<std::size_t>{1, 1, 1, 1, 3}));
  ASSERT_EQ(merged.items.size(), ds.items.size());
  for (std::size_t i = 0; i < ds.items.size(); ++i) EXPECT_EQ(merged.items[i].id, ds.items[i].id);
  // Long-name aliases of surviving classes still resolve.
  EXPECT_EQ(merged.taxonomy.index_of("Miscellaneous").value, 4u);
}

TEST(MergeClasses, IdentityIsNoOp) {
  const auto ds = small_dataset({0, 3, 2, 5});
  std::map<std::string, std::string> m;
  for (const auto& n : kTax.names()) m[n] = n;
  const auto merged = merge_classes(ds, m);
  EXPECT_EQ(merged.taxonomy, ds.taxonomy);
  EXPECT_EQ(merged.items, ds.items);
}

TEST(MergeClasses, UnmappedClassRejected) {
  std::map<std::string, std::string> m = {{"Exp", "Exp"}};
  EXPECT_EQ(kind_of([&] { merge_classes(small_dataset({0}), m); }), ErrorKind::kUnknownLabel);
  m = {{"Nope", "Exp"}};
  EXPECT_EQ(kind_of([&] { merge_classes(small_dataset({0}), m); }), ErrorKind::kUnknownLabel);
}

TEST(MergeClasses, DistributionCommutesOnSmallInstances) {
  // Every map of 3 classes onto names {P, Q}: distribution of the merge
  // equals the merged distribution.
  const Taxonomy tax({"A", "B", "C"});
  LabeledDataset ds{tax, {}};
  const std::vector<std::size_t> labels = {0, 1, 1, 2, 2, 2, 0};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ds.items.push_back({"i" + std::to_string(i), {"ك"}, ClassIndex{labels[i]}, {}});
  }
  const auto before = class_distribution(ds);
  for (int mask = 0; mask < 8; ++mask) {
    std::map<std::string, std::string> m;
    for (std::size_t c = 0; c < 3; ++c) m[tax.names()[c]] = (mask >> c) & 1 ? "Q" : "P";
    const auto merged = merge_classes(ds, m);
    const auto after = class_distribution(merged);
    for (std::size_t k = 0; k < merged.taxonomy.size(); ++k) {
      std::size_t expected = 0;
      for (std::size_t c = 0; c < 3; ++c) {
        if (m[tax.names()[c]] == merged.taxonomy.names()[k]) expected += before.counts[c];
      }
      EXPECT_EQ(after.counts[k], expected);
    }
    EXPECT_EQ(after.total, before.total);
  }
}

TEST(StratumCount, Boundaries) {
  EXPECT_EQ(stratum_test_count(10, 0.2), 2u);
  EXPECT_EQ(stratum_test_count(1, 0.2), 0u);
  EXPECT_EQ(stratum_test_count(0, 0.2), 0u);
  EXPECT_EQ(stratum_test_count(2, 0.9), 1u);
  EXPECT_EQ(stratum_test_count(5, 0.3), 2u);  // 1.5 rounds half up
  EXPECT_EQ(stratum_test_count(7, 0.2), 1u);  // 1.4
  EXPECT_EQ(stratum_test_count(8, 0.2), 2u);  // 1.6
}

TEST(StratifiedSplit, TenItemsTwoInTest) {
  const auto r = stratified_split(small_dataset(std::vector<std::size_t>(10, 0)));
  EXPECT_EQ(r.test.items.size(), 2u);
  EXPECT_EQ(r.train.items.size(), 8u);
}

TEST(StratifiedSplit, SingletonGoesToTrain) {
  const auto r = stratified_split(small_dataset({0, 0, 0, 0, 0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(r.test_counts, (std::vector<std::size_t>{1, 0, 0, 0, 0, 0}));
  EXPECT_EQ(r.train.items.size(), 9u);
}

TEST(StratifiedSplit, EmptyClassIsNotice) {
  const auto r = stratified_split(small_dataset({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
  EXPECT_EQ(r.notices.size(), 4u);
  EXPECT_NE(r.notices[0].find("Req"), std::string::npos);
}

TEST(StratifiedSplit, BadRatioRejected) {
  EXPECT_THROW(stratified_split(small_dataset({0}), {0.0, 42, false}), Error);
  EXPECT_THROW(stratified_split(small_dataset({0}), {1.0, 42, false}), Error);
}

TEST(StratifiedSplit, SkewedFixtureReproducesReferenceSupports) {
  const auto ds = fixtures::skewed_split_dataset();
  ASSERT_EQ(ds.items.size(), 22352u);
  const auto r = stratified_split(ds, {0.2, 42, false});
  EXPECT_EQ(r.test_counts, (std::vector<std::size_t>{2181, 1081, 495, 470, 169, 72}));
  EXPECT_EQ(r.test.items.size(), 4468u);
  const auto sizes = fixtures::skewed_split_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    EXPECT_LE(std::abs(static_cast<double>(r.test_counts[c]) - 0.2 * static_cast<double>(sizes[c])),
              1.0);
  }
}

TEST(StratifiedSplit, DisjointExhaustiveOrderPreserving) {
  const auto ds = fixtures::skewed_split_dataset();
  const auto r = stratified_split(ds, {0.2, 42, false});
  std::set<std::string> train, test;
  for (const auto& i : r.train.items) train.insert(i.id);
  for (const auto& i : r.test.items) test.insert(i.id);
  EXPECT_EQ(train.size() + test.size(), ds.items.size());
  for (const auto& id : test) EXPECT_EQ(train.count(id), 0u);
  // Each side is a subsequence of the input.
  std::size_t a = 0, b = 0;
  for (const auto& item : ds.items) {
    if (a < r.train.items.size() && r.train.items[a].id == item.id) ++a;
    else if (b < r.test.items.size() && r.test.items[b].id == item.id) ++b;
  }
  EXPECT_EQ(a, r.train.items.size());
  EXPECT_EQ(b, r.test.items.size());
}

TEST(StratifiedSplit, DeterministicAndSeedSensitive) {
  const auto ds = fixtures::skewed_split_dataset();
  const auto r1 = stratified_split(ds, {0.2, 42, false});
  const auto r2 = stratified_split(ds, {0.2, 42, false});
  EXPECT_EQ(r1.test.items, r2.test.items);
  EXPECT_EQ(r1.train.items, r2.train.items);
  const auto r3 = stratified_split(ds, {0.2, 43, false});
  EXPECT_EQ(r3.test_counts, r1.test_counts);
  EXPECT_NE(r3.test.items, r1.test.items);
}

TEST(StratifiedSplit, ExactTotalHitsOverallTarget) {
  // Six classes of 7: per-class rounding gives 6 * 1, overall round(8.4) = 8.
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < 6; ++c) labels.insert(labels.end(), 7, c);
  const auto ds = small_dataset(labels);
  const auto plain = stratified_split(ds, {0.2, 1, false});
  EXPECT_EQ(plain.test.items.size(), 6u);
  const auto exact = stratified_split(ds, {0.2, 1, true});
  EXPECT_EQ(exact.test.items.size(), 8u);
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_LE(std::abs(static_cast<double>(exact.test_counts[c]) - 1.4), 1.0);
  }
}
