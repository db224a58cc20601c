#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tweetact/backends.hpp"
#include "tweetact/dataset.hpp"
#include "tweetact/error.hpp"
#include "tweetact/normalize.hpp"
#include "tweetact/taxonomy.hpp"

namespace tweetact {

enum class Stage { kAdjudicate, kNormalize, kSplit, kAugment, kClassify, kFuse, kEvaluate };

inline constexpr Stage kAllStages[] = {Stage::kAdjudicate, Stage::kNormalize, Stage::kSplit,
                                       Stage::kAugment,    Stage::kClassify,  Stage::kFuse,
                                       Stage::kEvaluate};

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

// Process exit codes used by `tweetact run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
// Failure outside a pipeline stage (explain, report on bad input).
inline constexpr int kExitRuntime = 3;
// 11 adjudicate, 12 normalize, 13 split, 14 augment, 15 classify, 16 fuse,
// 17 evaluate.
int exit_code(Stage stage);

struct AugmentationSettings {
  bool enabled = false;
  bool train_only = false;
  std::uint64_t seed = 7;
  std::size_t top_k = 5;
  BackendDescriptor backend;
};

struct PipelineConfig {
  std::string input;
  std::string output_dir;
  Taxonomy taxonomy = Taxonomy::speech_acts();
  bool adjudicate = true;
  NormalizationConfig normalization;
  SplitOptions split;
  AugmentationSettings augmentation;
  std::vector<BackendDescriptor> models;
  std::vector<double> weights;
  unsigned threads = 1;
  // Canonical JSON of the effective config; hashed into the manifest.
  std::string canonical;
};

// The four tweet-pretrained ensemble members, served by the stub backend.
std::vector<BackendDescriptor> default_ensemble_models();

// Relative paths inside the config resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::string& base_dir = ".");
PipelineConfig load_pipeline_config(const std::string& path);

struct StageRecord {
  Stage stage;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  bool resumed = false;
};

struct RunManifest {
  std::string tool_version;
  std::string config_sha256;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<StageRecord> stages;
  std::string status;  // "ok" or "failed"
  std::optional<Stage> failed_stage;
  std::string error;
  std::string started_at;
  std::string finished_at;
};

std::string manifest_to_json(const RunManifest& manifest);

class StageFailure : public std::runtime_error {
 public:
  StageFailure(Stage stage, ErrorKind kind, const std::string& message);
  Stage stage() const { return stage_; }
  ErrorKind kind() const { return kind_; }

 private:
  Stage stage_;
  ErrorKind kind_;
};

// Runs adjudicate -> normalize -> split -> augment -> classify -> fuse ->
// evaluate, persisting every stage's output under output_dir and writing
// manifest.json last (also on failure). With `from`, earlier stages are not
// run and their persisted artifacts are consumed instead.
// Throws Error(kInvalidConfig / kIo) before any stage runs when inputs are
// missing, and StageFailure for a failing stage.
RunManifest run_pipeline(const PipelineConfig& config, std::optional<Stage> from = std::nullopt);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

std::string_view tool_version();

}  // namespace tweetact
