#include "tweetact/normalize.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "tweetact/error.hpp"

namespace tweetact {
namespace {

using json = nlohmann::json;

// Tags travel through rules 5-8 as private-use code points so that no
// letter rule can touch them.
constexpr char32_t kSentinelBase = 0xE000;
constexpr std::size_t kTagCount = 5;
enum TagKind : std::size_t { kUrl, kMention, kHashtag, kQuestion, kExclamation };

bool is_sentinel(char32_t cp) {
  return cp >= kSentinelBase && cp < kSentinelBase + kTagCount;
}

std::u32string to_u32(std::string_view utf8) {
  const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  out.reserve(static_cast<std::size_t>(u.length()));
  for (int32_t i = 0; i < u.length(); i = u.moveIndex32(i, 1)) {
    out.push_back(static_cast<char32_t>(u.char32At(i)));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(cp));
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string to_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::u32string nfkc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) fail(ErrorKind::kInvalidConfig, "ICU NFKC data unavailable");
  // Ill-formed UTF-8 becomes U+FFFD here and is removed by rule 7.
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString folded = normalizer->normalize(src, status);
  if (U_FAILURE(status)) return {};
  std::u32string out;
  out.reserve(static_cast<std::size_t>(folded.length()));
  for (int32_t i = 0; i < folded.length(); i = folded.moveIndex32(i, 1)) {
    out.push_back(static_cast<char32_t>(folded.char32At(i)));
  }
  return out;
}

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

bool is_ascii_alnum(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
         (cp >= U'A' && cp <= U'Z');
}

bool is_handle_char(char32_t cp) { return is_ascii_alnum(cp) || cp == U'_'; }

bool is_url_char(char32_t cp) { return cp >= 0x21 && cp <= 0x7E; }

bool is_hashtag_char(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  return cp == U'_' || u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool is_format_control(char32_t cp) {
  return u_charType(static_cast<UChar32>(cp)) == U_FORMAT_CHAR;
}

bool starts_with_ci(std::u32string_view s, std::size_t pos, std::u32string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char32_t c = s[pos + k];
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    if (c != prefix[k]) return false;
  }
  return true;
}

std::size_t url_prefix_length(std::u32string_view s, std::size_t pos) {
  for (std::u32string_view p : {std::u32string_view(U"https://"),
                                std::u32string_view(U"http://"),
                                std::u32string_view(U"www.")}) {
    if (starts_with_ci(s, pos, p)) return p.size();
  }
  return 0;
}

void emit_tag(std::u32string& out, TagKind kind) {
  out.push_back(U' ');
  out.push_back(kSentinelBase + kind);
  out.push_back(U' ');
}

char32_t single_code_point(const std::string& s, const char* what) {
  const auto cps = to_u32(s);
  if (cps.size() != 1) {
    fail(ErrorKind::kInvalidConfig,
         std::string(what) + " '" + s + "' must be a single code point");
  }
  return cps.front();
}

}  // namespace

bool is_arabic_diacritic(char32_t cp) {
  return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670;
}

bool is_arabic_letter(char32_t cp) {
  return (cp >= 0x0620 && cp <= 0x063F) || (cp >= 0x0641 && cp <= 0x064A) ||
         (cp >= 0x066E && cp <= 0x066F) || (cp >= 0x0671 && cp <= 0x06D3) ||
         cp == 0x06D5 || (cp >= 0x06EE && cp <= 0x06EF) ||
         (cp >= 0x06FA && cp <= 0x06FC) || cp == 0x06FF;
}

std::map<char32_t, char32_t> NormalizationConfig::default_letter_map() {
  return {{U'أ', U'ا'}, {U'إ', U'ا'}, {U'آ', U'ا'},
          {U'ٱ', U'ا'}, {U'ى', U'ي'}, {U'ة', U'ه'}};
}

void NormalizationConfig::validate() const {
  if (elongation_cap < 1) fail(ErrorKind::kInvalidConfig, "elongation_cap must be >= 1");
  if (min_words < 1) fail(ErrorKind::kInvalidConfig, "min_words must be >= 1");

  std::set<std::string> seen;
  for (const auto& tag : tags.all()) {
    if (tag.empty()) fail(ErrorKind::kInvalidConfig, "tag tokens must be non-empty");
    const auto cps = to_u32(tag);
    if (to_utf8(cps) != tag) {
      fail(ErrorKind::kInvalidConfig, "tag token is not valid UTF-8");
    }
    for (char32_t cp : cps) {
      if (is_space(cp)) {
        fail(ErrorKind::kInvalidConfig, "tag token '" + tag + "' contains whitespace");
      }
      if (is_sentinel(cp)) {
        fail(ErrorKind::kInvalidConfig, "tag token '" + tag + "' uses a reserved code point");
      }
    }
    if (to_utf8(nfkc(tag)) != tag) {
      fail(ErrorKind::kInvalidConfig, "tag token '" + tag + "' is not NFKC-stable");
    }
    if (!seen.insert(tag).second) {
      fail(ErrorKind::kInvalidConfig, "tag token '" + tag + "' is used twice");
    }
  }

  for (const auto& [from, to] : letter_map) {
    if (!is_arabic_letter(from) || !is_arabic_letter(to)) {
      fail(ErrorKind::kInvalidConfig, "letter_map entries must be Arabic letters");
    }
    if (letter_map.count(to) != 0 && letter_map.at(to) != to) {
      fail(ErrorKind::kInvalidConfig,
           "letter_map image " + to_utf8(std::u32string(1, to)) + " is itself remapped");
    }
    if (to_utf8(nfkc(to_utf8(std::u32string(1, to)))) != to_utf8(std::u32string(1, to))) {
      fail(ErrorKind::kInvalidConfig, "letter_map image must be NFKC-stable");
    }
  }
}

NormalizationConfig parse_normalization_config(std::string_view json_text) {
  NormalizationConfig config;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("normalization config: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, "normalization config must be an object");
  try {
    if (auto it = doc.find("tags"); it != doc.end()) {
      auto& t = config.tags;
      t.url = it->value("url", t.url);
      t.mention = it->value("mention", t.mention);
      t.hashtag = it->value("hashtag", t.hashtag);
      t.question = it->value("question", t.question);
      t.exclamation = it->value("exclamation", t.exclamation);
    }
    if (auto it = doc.find("letter_map"); it != doc.end()) {
      config.letter_map.clear();
      for (const auto& [from, to] : it->items()) {
        config.letter_map[single_code_point(from, "letter_map key")] =
            single_code_point(to.get<std::string>(), "letter_map value");
      }
    }
    if (auto it = doc.find("elongation_cap"); it != doc.end()) {
      const auto v = it->get<long long>();
      if (v < 1) fail(ErrorKind::kInvalidConfig, "elongation_cap must be >= 1");
      config.elongation_cap = static_cast<std::size_t>(v);
    }
    if (auto it = doc.find("min_words"); it != doc.end()) {
      const auto v = it->get<long long>();
      if (v < 1) fail(ErrorKind::kInvalidConfig, "min_words must be >= 1");
      config.min_words = static_cast<std::size_t>(v);
    }
    config.drop_hashtag_body = doc.value("drop_hashtag_body", config.drop_hashtag_body);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("normalization config: ") + e.what());
  }
  config.validate();
  return config;
}

NormalizationConfig load_normalization_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open normalization config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_normalization_config(buf.str());
}

std::string to_json(const NormalizationConfig& config) {
  json doc;
  doc["tags"] = {{"url", config.tags.url},
                 {"mention", config.tags.mention},
                 {"hashtag", config.tags.hashtag},
                 {"question", config.tags.question},
                 {"exclamation", config.tags.exclamation}};
  json map = json::object();
  for (const auto& [from, to] : config.letter_map) {
    map[to_utf8(std::u32string(1, from))] = to_utf8(std::u32string(1, to));
  }
  doc["letter_map"] = map;
  doc["elongation_cap"] = config.elongation_cap;
  doc["min_words"] = config.min_words;
  doc["drop_hashtag_body"] = config.drop_hashtag_body;
  return doc.dump(2);
}

Normalizer::Normalizer(NormalizationConfig config) : config_(std::move(config)) {
  config_.validate();
  for (const auto& tag : config_.tags.all()) tags_.push_back(to_u32(tag));
}

bool Normalizer::is_tag(std::string_view token) const {
  const auto all = config_.tags.all();
  return std::find(all.begin(), all.end(), token) != all.end();
}

bool Normalizer::is_canonical_word(std::string_view token) const {
  const auto cps = to_u32(token);
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(), [&](char32_t cp) {
    return is_arabic_letter(cp) && config_.letter_map.count(cp) == 0;
  });
}

std::vector<std::string> Normalizer::normalize(std::string_view text) const {
  const std::u32string folded = nfkc(text);

  // Rules 1-4, chunk by chunk. Structural spans never cross whitespace.
  std::u32string work;
  work.reserve(folded.size() + 8);
  std::size_t pos = 0;
  while (pos < folded.size()) {
    if (is_space(folded[pos])) {
      work.push_back(U' ');
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < folded.size() && !is_space(folded[end])) ++end;
    const std::u32string_view chunk(folded.data() + pos, end - pos);
    pos = end;

    if (auto it = std::find(tags_.begin(), tags_.end(), chunk); it != tags_.end()) {
      emit_tag(work, static_cast<TagKind>(it - tags_.begin()));
      continue;
    }

    std::size_t i = 0;
    while (i < chunk.size()) {
      const char32_t c = chunk[i];
      if (const auto plen = url_prefix_length(chunk, i); plen > 0) {
        emit_tag(work, kUrl);
        i += plen;
        while (i < chunk.size() && is_url_char(chunk[i])) ++i;
        continue;
      }
      if (c == U'@' && i + 1 < chunk.size() && is_handle_char(chunk[i + 1]) &&
          (i == 0 || !is_ascii_alnum(chunk[i - 1]))) {
        emit_tag(work, kMention);
        ++i;
        while (i < chunk.size() && is_handle_char(chunk[i])) ++i;
        continue;
      }
      if (c == U'#' && i + 1 < chunk.size() && is_hashtag_char(chunk[i + 1])) {
        emit_tag(work, kHashtag);
        ++i;
        if (config_.drop_hashtag_body) {
          while (i < chunk.size() && is_hashtag_char(chunk[i])) ++i;
        }
        continue;
      }
      if (c == U'?' || c == U'؟') {
        emit_tag(work, kQuestion);
      } else if (c == U'!') {
        emit_tag(work, kExclamation);
      } else {
        work.push_back(c);
      }
      ++i;
    }
  }

  // Rules 5-8.
  std::u32string clean;
  clean.reserve(work.size());
  char32_t run_char = 0;
  std::size_t run_length = 0;
  for (char32_t cp : work) {
    if (!is_sentinel(cp)) {
      if (is_arabic_diacritic(cp) || cp == kTatweel) continue;
      if (auto it = config_.letter_map.find(cp); it != config_.letter_map.end()) {
        cp = it->second;
      }
      if (!is_arabic_letter(cp)) {
        if (is_format_control(cp)) continue;
        cp = U' ';
      }
    }
    if (cp == run_char) {
      ++run_length;
    } else {
      run_char = cp;
      run_length = 1;
    }
    if (run_length > config_.elongation_cap && cp != U' ') continue;
    clean.push_back(cp);
  }

  // Rule 9.
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < clean.size()) {
    while (start < clean.size() && clean[start] == U' ') ++start;
    std::size_t stop = start;
    while (stop < clean.size() && clean[stop] != U' ') ++stop;
    if (stop > start) {
      const std::u32string_view tok(clean.data() + start, stop - start);
      if (tok.size() == 1 && is_sentinel(tok.front())) {
        tokens.push_back(config_.tags.all()[tok.front() - kSentinelBase]);
      } else {
        tokens.push_back(to_utf8(tok));
      }
    }
    start = stop;
  }
  return tokens;
}

std::vector<std::string> normalize_text(std::string_view raw_text,
                                        const NormalizationConfig& config) {
  return Normalizer(config).normalize(raw_text);
}

std::vector<NormalizedTweet> normalize_dataset(std::span<const RawTweet> tweets,
                                               const NormalizationConfig& config,
                                               unsigned threads) {
  {
    std::unordered_set<std::string_view> ids;
    ids.reserve(tweets.size());
    for (const auto& t : tweets) {
      if (!ids.insert(t.id).second) {
        fail(ErrorKind::kDuplicateId, "tweet id '" + t.id + "' appears more than once");
      }
    }
  }

  const Normalizer normalizer(config);
  std::vector<std::vector<std::string>> tokens(tweets.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) tokens[i] = normalizer.normalize(tweets[i].text);
  };

  const std::size_t n = tweets.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }

  std::vector<NormalizedTweet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i].size() < config.min_words) continue;
    out.push_back({tweets[i].id, std::move(tokens[i]), tweets[i].label, tweets[i].votes});
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace tweetact
