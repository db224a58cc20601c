#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tweetact/ensemble.hpp"
#include "tweetact/taxonomy.hpp"

namespace tweetact {

struct TextItem {
  std::string id;
  std::string text;
};

// Batch classification port. Implementations return exactly one row per
// item, in request order, already checked with validate_matrix.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual const std::string& model_id() const = 0;
  virtual ProbabilityMatrix classify_batch(std::span<const TextItem> items) = 0;
};

// Masked-word insertion port: candidate words for a slot inserted before
// `position` (position == tokens.size() appends).
class MaskFiller {
 public:
  virtual ~MaskFiller() = default;
  virtual std::vector<std::string> fill_mask(std::span<const std::string> tokens,
                                             std::size_t position, std::size_t top_k) = 0;
};

enum class BackendKind { kFile, kHttp, kStub };

BackendKind parse_backend_kind(std::string_view name);
std::string_view to_string(BackendKind kind);

struct BackendDescriptor {
  BackendKind kind = BackendKind::kStub;
  // File path (kFile) or base URL (kHttp); unused for kStub.
  std::string location;
  std::string model_id;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds max_backoff{2'000};
  std::size_t max_batch = 64;
};

inline constexpr const char* kBackendUrlEnv = "TWEETACT_BACKEND_URL";
inline constexpr const char* kBackendTimeoutEnv = "TWEETACT_BACKEND_TIMEOUT_SECS";

// Defaults overridden by TWEETACT_BACKEND_TIMEOUT_SECS when set.
HttpOptions http_options_from_env();
// Descriptor location if non-empty, else TWEETACT_BACKEND_URL; throws
// kInvalidConfig when neither is set.
std::string resolve_backend_url(const std::string& location);

// Deterministic stand-in: each row is a pure function of (model_id, text),
// built from FNV-1a of both and normalized to sum to 1.
class StubClassifier final : public ClassifierBackend {
 public:
  StubClassifier(Taxonomy taxonomy, std::string model_id);
  const std::string& model_id() const override { return model_id_; }
  ProbabilityMatrix classify_batch(std::span<const TextItem> items) override;

 private:
  Taxonomy taxonomy_;
  std::string model_id_;
};

// Serves rows from a probability CSV, looked up by item id.
class FileClassifier final : public ClassifierBackend {
 public:
  FileClassifier(const std::string& path, Taxonomy taxonomy, std::string model_id = {});
  const std::string& model_id() const override { return matrix_.model_id(); }
  ProbabilityMatrix classify_batch(std::span<const TextItem> items) override;

 private:
  Taxonomy taxonomy_;
  ProbabilityMatrix matrix_;
  std::unordered_map<std::string, std::size_t> index_;
};

// POST {base}/classify  {"texts":[...]} -> {"classes":[...],"probabilities":[[...],...]}
class HttpClassifier final : public ClassifierBackend {
 public:
  HttpClassifier(std::string base_url, Taxonomy taxonomy, std::string model_id,
                 HttpOptions options = http_options_from_env());
  const std::string& model_id() const override { return model_id_; }
  ProbabilityMatrix classify_batch(std::span<const TextItem> items) override;

 private:
  std::string base_url_;
  Taxonomy taxonomy_;
  std::string model_id_;
  HttpOptions options_;
};

// Fixed Arabic filler words, chosen by a hash of (tokens, position).
class StubMaskFiller final : public MaskFiller {
 public:
  std::vector<std::string> fill_mask(std::span<const std::string> tokens, std::size_t position,
                                     std::size_t top_k) override;
};

// POST {base}/fill-mask  {"tokens":[...],"position":i,"top_k":n} -> {"candidates":[...]}
class HttpMaskFiller final : public MaskFiller {
 public:
  explicit HttpMaskFiller(std::string base_url, HttpOptions options = http_options_from_env());
  std::vector<std::string> fill_mask(std::span<const std::string> tokens, std::size_t position,
                                     std::size_t top_k) override;

 private:
  std::string base_url_;
  HttpOptions options_;
};

std::unique_ptr<ClassifierBackend> make_classifier(const BackendDescriptor& descriptor,
                                                   const Taxonomy& taxonomy);
std::unique_ptr<MaskFiller> make_mask_filler(const BackendDescriptor& descriptor);

// Words the stub backends draw from.
std::span<const std::string_view> stub_wordlist();

}  // namespace tweetact
