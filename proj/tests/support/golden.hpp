#pragma once

#include <string>
#include <vector>

#include "tweetact/normalize.hpp"

namespace golden {

enum class Variant { kDefault, kDropHashtagBody, kCap1, kCap3, kEnglishTags };

struct Case {
  std::string name;
  std::string input;
  std::vector<std::string> expected;
  Variant variant = Variant::kDefault;
};

tweetact::NormalizationConfig config_for(Variant variant);

// Hand-built cases; each expected list is worked out from the rules, not
// captured from a run.
const std::vector<Case>& normalization_cases();

// Random tweets mixing Arabic letters, diacritics, tatweel, presentation
// forms, Latin, digits, emoji, punctuation, URLs, mentions, hashtags, format
// controls, tag tokens and odd whitespace.
std::vector<std::string> fuzz_corpus(std::uint64_t seed, std::size_t count);

}  // namespace golden
