#include <gtest/gtest.h>

#include "tweetact/error.hpp"
#include "tweetact/taxonomy.hpp"

using namespace tweetact;

TEST(Taxonomy, SpeechActOrder) {
  const auto tax = Taxonomy::speech_acts();
  const std::vector<std::string> expected = {"Exp", "Que", "Req", "Ass", "Rec", "Oth"};
  EXPECT_EQ(tax.names(), expected);
}

TEST(Taxonomy, AliasesResolveToCanonicalIndex) {
  const auto tax = Taxonomy::speech_acts();
  EXPECT_EQ(tax.index_of("Expression").value, 0u);
  EXPECT_EQ(tax.index_of("Qus").value, 1u);
  EXPECT_EQ(tax.index_of("Question").value, 1u);
  EXPECT_EQ(tax.index_of("Recommended").value, 4u);
  EXPECT_EQ(tax.index_of("Miscellaneous").value, 5u);
  EXPECT_EQ(tax.index_of("Other").value, 5u);
  EXPECT_EQ(tax.name(tax.index_of("Mis")), "Oth");
}

TEST(Taxonomy, UnknownLabelThrows) {
  const auto tax = Taxonomy::speech_acts();
  EXPECT_FALSE(tax.find("Sarcasm").has_value());
  try {
    tax.index_of("Sarcasm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownLabel);
  }
}

TEST(Taxonomy, DuplicateNamesRejected) {
  EXPECT_THROW(Taxonomy({"A", "B", "A"}), Error);
}

TEST(Taxonomy, ParseList) {
  const auto tax = parse_taxonomy_list("A, B ,C");
  const std::vector<std::string> expected = {"A", "B", "C"};
  EXPECT_EQ(tax.names(), expected);
  EXPECT_THROW(parse_taxonomy_list(""), Error);
}

TEST(Taxonomy, EqualityIgnoresAliases) {
  EXPECT_EQ(Taxonomy::speech_acts(), parse_taxonomy_list("Exp,Que,Req,Ass,Rec,Oth"));
}
