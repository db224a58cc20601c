#include "tweetact/backends.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tweetact/error.hpp"
#include "tweetact/io.hpp"
#include "tweetact/rng.hpp"

namespace tweetact {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 12> kStubWords = {
    "جدا", "فعلا", "الان", "هنا", "ايضا", "دائما",
    "كثيرا", "حقا", "اليوم", "كل", "مره", "والله"};

std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : data) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

struct ParsedUrl {
  std::string scheme_host_port;
  std::string base_path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex pattern(R"(^(http://[^/\s:]+(:[0-9]{1,5})?)(/[^\s]*)?$)",
                                  std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    fail(ErrorKind::kInvalidConfig, "backend URL '" + url + "' is not a well-formed http:// URL");
  }
  ParsedUrl out{m[1].str(), m[3].matched ? m[3].str() : std::string()};
  while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  return out;
}

// POSTs JSON with bounded retries on transport errors and 5xx replies.
json post_json(const std::string& base_url, const std::string& endpoint, const json& body,
               const HttpOptions& options) {
  const ParsedUrl url = parse_url(base_url);
  const std::string path = url.base_path + endpoint;
  const std::string payload = body.dump(-1, ' ', false, json::error_handler_t::replace);

  std::string last_error;
  auto backoff = options.initial_backoff;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options.max_backoff);
    }
    httplib::Client client(url.scheme_host_port);
    const auto secs = options.timeout.count() / 1000;
    const auto usecs = (options.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorKind::kBackendUnavailable, base_url + endpoint + " answered HTTP " +
                                               std::to_string(res->status) + ": " + res->body);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      fail(ErrorKind::kMalformedResponse, base_url + endpoint + ": " + e.what());
    }
  }
  fail(ErrorKind::kBackendUnavailable, base_url + endpoint + " unreachable after " +
                                           std::to_string(options.max_retries + 1) +
                                           " attempts: " + last_error);
}

}  // namespace

std::span<const std::string_view> stub_wordlist() { return kStubWords; }

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "file") return BackendKind::kFile;
  if (name == "http") return BackendKind::kHttp;
  if (name == "stub") return BackendKind::kStub;
  fail(ErrorKind::kInvalidConfig, "unknown backend kind '" + std::string(name) + "'");
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kFile: return "file";
    case BackendKind::kHttp: return "http";
    case BackendKind::kStub: return "stub";
  }
  return "unknown";
}

HttpOptions http_options_from_env() {
  HttpOptions options;
  if (const char* v = std::getenv(kBackendTimeoutEnv); v != nullptr && *v != '\0') {
    char* end = nullptr;
    const double secs = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(secs > 0.0)) {
      fail(ErrorKind::kInvalidConfig,
           std::string(kBackendTimeoutEnv) + " must be a positive number of seconds");
    }
    options.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
  }
  return options;
}

std::string resolve_backend_url(const std::string& location) {
  if (!location.empty()) return location;
  if (const char* v = std::getenv(kBackendUrlEnv); v != nullptr && *v != '\0') return v;
  fail(ErrorKind::kInvalidConfig,
       std::string("http backend needs a URL (flag or ") + kBackendUrlEnv + ")");
}

StubClassifier::StubClassifier(Taxonomy taxonomy, std::string model_id)
    : taxonomy_(std::move(taxonomy)), model_id_(std::move(model_id)) {}

ProbabilityMatrix StubClassifier::classify_batch(std::span<const TextItem> items) {
  ProbabilityMatrix out(model_id_, taxonomy_.names());
  std::vector<double> row(taxonomy_.size());
  const std::uint64_t model_hash = fnv1a(model_id_);
  for (const auto& item : items) {
    Rng rng(derive_seed(fnv1a(item.text, model_hash), 0));
    double sum = 0.0;
    for (auto& v : row) {
      v = 0.05 + rng.uniform01();
      sum += v;
    }
    for (auto& v : row) v /= sum;
    out.add_row(item.id, row);
  }
  return out;
}

FileClassifier::FileClassifier(const std::string& path, Taxonomy taxonomy, std::string model_id)
    : taxonomy_(std::move(taxonomy)), matrix_(read_probability_csv(path, std::move(model_id))) {
  validate_matrix(matrix_, taxonomy_);
  for (std::size_t i = 0; i < matrix_.rows(); ++i) index_.emplace(matrix_.ids()[i], i);
}

ProbabilityMatrix FileClassifier::classify_batch(std::span<const TextItem> items) {
  ProbabilityMatrix out(matrix_.model_id(), matrix_.class_names());
  for (const auto& item : items) {
    auto it = index_.find(item.id);
    if (it == index_.end()) {
      fail(ErrorKind::kMissingRow, "model '" + matrix_.model_id() + "' has no row for id '" +
                                       item.id + "'");
    }
    out.add_row(item.id, matrix_.row(it->second));
  }
  return out;
}

HttpClassifier::HttpClassifier(std::string base_url, Taxonomy taxonomy, std::string model_id,
                               HttpOptions options)
    : base_url_(std::move(base_url)),
      taxonomy_(std::move(taxonomy)),
      model_id_(std::move(model_id)),
      options_(options) {
  parse_url(base_url_);
}

ProbabilityMatrix HttpClassifier::classify_batch(std::span<const TextItem> items) {
  ProbabilityMatrix out(model_id_, taxonomy_.names());
  const std::size_t batch = std::max<std::size_t>(options_.max_batch, 1);
  for (std::size_t begin = 0; begin < items.size(); begin += batch) {
    const auto chunk = items.subspan(begin, std::min(batch, items.size() - begin));
    json texts = json::array();
    for (const auto& item : chunk) texts.push_back(item.text);
    const json reply = post_json(base_url_, "/classify", json{{"texts", texts}}, options_);

    const auto where = base_url_ + "/classify";
    if (!reply.is_object() || !reply.contains("classes") || !reply.contains("probabilities") ||
        !reply["classes"].is_array() || !reply["probabilities"].is_array()) {
      fail(ErrorKind::kMalformedResponse, where + ": expected {classes, probabilities}");
    }
    std::vector<std::string> classes;
    try {
      classes = reply["classes"].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      fail(ErrorKind::kMalformedResponse, where + ": classes must be strings");
    }
    if (classes != taxonomy_.names()) {
      fail(ErrorKind::kClassOrderMismatch,
           where + ": backend class order " + reply["classes"].dump() +
               " differs from the taxonomy");
    }
    const auto& rows = reply["probabilities"];
    if (rows.size() != chunk.size()) {
      fail(ErrorKind::kMalformedResponse, where + ": " + std::to_string(rows.size()) +
                                              " rows for " + std::to_string(chunk.size()) +
                                              " texts");
    }
    std::vector<double> row(classes.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (!rows[i].is_array() || rows[i].size() != classes.size()) {
        fail(ErrorKind::kMalformedResponse, where + ": row " + std::to_string(i) + " has wrong width");
      }
      for (std::size_t c = 0; c < classes.size(); ++c) {
        if (!rows[i][c].is_number()) {
          fail(ErrorKind::kMalformedResponse, where + ": non-numeric probability");
        }
        row[c] = rows[i][c].get<double>();
      }
      out.add_row(chunk[i].id, row);
    }
  }
  validate_matrix(out, taxonomy_);
  return out;
}

std::vector<std::string> StubMaskFiller::fill_mask(std::span<const std::string> tokens,
                                                   std::size_t position, std::size_t top_k) {
  if (position > tokens.size()) {
    fail(ErrorKind::kInvalidArgument, "mask position " + std::to_string(position) +
                                          " beyond " + std::to_string(tokens.size()) + " tokens");
  }
  std::uint64_t h = fnv1a(std::to_string(position));
  for (const auto& t : tokens) h = fnv1a(t, fnv1a("\x1f", h));
  const std::size_t n = std::min(top_k, kStubWords.size());
  const std::size_t start = static_cast<std::size_t>(h % kStubWords.size());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(kStubWords[(start + k) % kStubWords.size()]);
  return out;
}

HttpMaskFiller::HttpMaskFiller(std::string base_url, HttpOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  parse_url(base_url_);
}

std::vector<std::string> HttpMaskFiller::fill_mask(std::span<const std::string> tokens,
                                                   std::size_t position, std::size_t top_k) {
  if (position > tokens.size()) {
    fail(ErrorKind::kInvalidArgument, "mask position " + std::to_string(position) +
                                          " beyond " + std::to_string(tokens.size()) + " tokens");
  }
  const json body = {{"tokens", std::vector<std::string>(tokens.begin(), tokens.end())},
                     {"position", position},
                     {"top_k", top_k}};
  const json reply = post_json(base_url_, "/fill-mask", body, options_);
  const auto where = base_url_ + "/fill-mask";
  if (!reply.is_object() || !reply.contains("candidates") || !reply["candidates"].is_array()) {
    fail(ErrorKind::kMalformedResponse, where + ": missing 'candidates' array");
  }
  std::vector<std::string> out;
  for (const auto& c : reply["candidates"]) {
    if (!c.is_string()) fail(ErrorKind::kMalformedResponse, where + ": candidates must be strings");
    if (out.size() < top_k) out.push_back(c.get<std::string>());
  }
  return out;
}

std::unique_ptr<ClassifierBackend> make_classifier(const BackendDescriptor& descriptor,
                                                   const Taxonomy& taxonomy) {
  switch (descriptor.kind) {
    case BackendKind::kStub:
      return std::make_unique<StubClassifier>(taxonomy, descriptor.model_id.empty() ? "stub" : descriptor.model_id);
    case BackendKind::kFile:
      return std::make_unique<FileClassifier>(descriptor.location, taxonomy, descriptor.model_id);
    case BackendKind::kHttp:
      return std::make_unique<HttpClassifier>(resolve_backend_url(descriptor.location), taxonomy,
                                              descriptor.model_id.empty() ? "http" : descriptor.model_id);
  }
  fail(ErrorKind::kInvalidConfig, "unknown backend kind");
}

std::unique_ptr<MaskFiller> make_mask_filler(const BackendDescriptor& descriptor) {
  switch (descriptor.kind) {
    case BackendKind::kStub:
      return std::make_unique<StubMaskFiller>();
    case BackendKind::kHttp:
      return std::make_unique<HttpMaskFiller>(resolve_backend_url(descriptor.location));
    case BackendKind::kFile:
      break;
  }
  fail(ErrorKind::kInvalidConfig, "mask filling needs a stub or http backend");
}

}  // namespace tweetact
