#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetact/types.hpp"

namespace tweetact {

// Replacement tokens for structural events in tweet text.
struct TagLexicon {
  std::string url = "رابط";
  std::string mention = "مستخدم";
  std::string hashtag = "وسم";
  std::string question = "سؤال";
  std::string exclamation = "تعجب";

  std::vector<std::string> all() const {
    return {url, mention, hashtag, question, exclamation};
  }
};

struct NormalizationConfig {
  TagLexicon tags;
  // Single code point to single code point. Images must be letters that are
  // not themselves keys, so the map is idempotent.
  std::map<char32_t, char32_t> letter_map = default_letter_map();
  std::size_t elongation_cap = 2;
  std::size_t min_words = 3;
  // Replace "#body" by the hashtag tag alone instead of tag + body.
  bool drop_hashtag_body = false;

  // أ إ آ ٱ -> ا, ى -> ي, ة -> ه
  static std::map<char32_t, char32_t> default_letter_map();

  // Throws Error(kInvalidConfig) describing the first violated invariant.
  void validate() const;
};

// Parses the JSON form of NormalizationConfig. Missing keys keep defaults;
// a present "letter_map" replaces the default map wholesale.
NormalizationConfig parse_normalization_config(std::string_view json_text);
NormalizationConfig load_normalization_config(const std::string& path);
std::string to_json(const NormalizationConfig& config);

// Letters of the Arabic block (U+0600-U+06FF) that may appear in output,
// before removing letter_map keys.
bool is_arabic_letter(char32_t cp);
// U+064B-U+065F and U+0670.
bool is_arabic_diacritic(char32_t cp);
inline constexpr char32_t kTatweel = 0x0640;

// Tweet normalizer. Rules run in a fixed order over NFKC-folded text:
//   1. URL spans (http://, https://, www.) -> url tag
//   2. @handle -> mention tag
//   3. '#' marker -> hashtag tag, body kept as a word
//   4. each ? / ؟ -> question tag, each ! -> exclamation tag
//   5. strip diacritics and tatweel
//   6. letter_map
//   7. anything that is not an Arabic letter becomes a separator
//      (format controls such as ZWNJ are deleted instead)
//   8. runs longer than elongation_cap are cut to elongation_cap
//   9. split on whitespace
// A whitespace-delimited input chunk that is exactly a tag token is kept as
// that tag, which makes the transform idempotent for any tag vocabulary.
class Normalizer {
 public:
  explicit Normalizer(NormalizationConfig config);

  std::vector<std::string> normalize(std::string_view text) const;

  const NormalizationConfig& config() const { return config_; }
  bool is_tag(std::string_view token) const;
  // True when every code point of `token` is an output letter.
  bool is_canonical_word(std::string_view token) const;

 private:
  NormalizationConfig config_;
  std::vector<std::u32string> tags_;
};

std::vector<std::string> normalize_text(std::string_view raw_text,
                                        const NormalizationConfig& config);

// Normalizes every tweet and drops those with fewer than min_words tokens.
// Input order is preserved for any thread count. Throws kDuplicateId.
std::vector<NormalizedTweet> normalize_dataset(std::span<const RawTweet> tweets,
                                               const NormalizationConfig& config,
                                               unsigned threads = 1);

std::string join_tokens(std::span<const std::string> tokens);

}  // namespace tweetact
