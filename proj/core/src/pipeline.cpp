#include "tweetact/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "tweetact/augment.hpp"
#include "tweetact/ensemble.hpp"
#include "tweetact/io.hpp"
#include "tweetact/metrics.hpp"
#include "tweetact/report.hpp"
#include "tweetact/rng.hpp"

#ifndef TWEETACT_VERSION
#define TWEETACT_VERSION "0.0.0"
#endif

namespace tweetact {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).lexically_normal().string();
}

std::string safe_file_name(std::string_view model_id) {
  std::string out;
  for (char c : model_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "model" : out;
}

BackendDescriptor parse_descriptor(const json& j, const std::string& base_dir) {
  BackendDescriptor d;
  d.kind = parse_backend_kind(j.value("kind", std::string("stub")));
  d.location = j.value("location", std::string());
  if (d.kind == BackendKind::kFile) d.location = resolve(base_dir, d.location);
  d.model_id = j.value("model_id", std::string());
  return d;
}

json descriptor_json(const BackendDescriptor& d) {
  return {{"kind", std::string(to_string(d.kind))}, {"location", d.location}, {"model_id", d.model_id}};
}

// Artifact names under output_dir.
struct Paths {
  fs::path dir;
  std::string adjudicated() const { return (dir / "adjudicated.jsonl").string(); }
  std::string adjudication() const { return (dir / "adjudication.json").string(); }
  std::string normalized() const { return (dir / "normalized.jsonl").string(); }
  std::string train() const { return (dir / "train.jsonl").string(); }
  std::string test() const { return (dir / "test.jsonl").string(); }
  std::string split() const { return (dir / "split.json").string(); }
  std::string train_aug() const { return (dir / "train.aug.jsonl").string(); }
  std::string test_aug() const { return (dir / "test.aug.jsonl").string(); }
  std::string augment() const { return (dir / "augment.json").string(); }
  std::string eval() const { return (dir / "eval.jsonl").string(); }
  std::string probs(const std::string& model_id) const {
    return (dir / "probs" / (safe_file_name(model_id) + ".csv")).string();
  }
  std::string fused() const { return (dir / "fused.csv").string(); }
  std::string predictions() const { return (dir / "predictions.tsv").string(); }
  std::string report_json() const { return (dir / "report.json").string(); }
  std::string report_txt() const { return (dir / "report.txt").string(); }
  std::string confusion() const { return (dir / "confusion.csv").string(); }
  std::string manifest() const { return (dir / "manifest.json").string(); }
};

using Counts = std::vector<std::pair<std::string, std::uint64_t>>;

class PipelineRun {
 public:
  explicit PipelineRun(const PipelineConfig& config) : config_(config), paths_{config.output_dir} {}

  Counts run(Stage stage) {
    switch (stage) {
      case Stage::kAdjudicate: return adjudicate();
      case Stage::kNormalize: return normalize();
      case Stage::kSplit: return split();
      case Stage::kAugment: return augment();
      case Stage::kClassify: return classify();
      case Stage::kFuse: return fuse_stage();
      case Stage::kEvaluate: return evaluate_stage();
    }
    return {};
  }

 private:
  Counts adjudicate() {
    const auto tweets = read_tweets_jsonl(config_.input);
    std::vector<RawTweet> kept;
    json report = {{"excluded_ids", json::array()}};
    if (config_.adjudicate) {
      auto result = adjudicate_dataset(tweets, config_.taxonomy);
      kept = std::move(result.tweets);
      report["excluded_ids"] = result.report.excluded_ids;
      report["counts"] = result.report.counts.counts;
    } else {
      for (const auto& t : tweets) {
        if (!t.label) fail(ErrorKind::kUnknownLabel, "tweet '" + t.id + "' has no label");
        RawTweet copy = t;
        copy.label = config_.taxonomy.name(config_.taxonomy.index_of(*t.label));
        kept.push_back(std::move(copy));
      }
    }
    write_tweets_jsonl(paths_.adjudicated(), kept);
    write_file(paths_.adjudication(), report.dump(2) + "\n");
    return {{"input", tweets.size()},
            {"retained", kept.size()},
            {"excluded", tweets.size() - kept.size()}};
  }

  Counts normalize() {
    const auto tweets = read_tweets_jsonl(paths_.adjudicated());
    const auto normalized = normalize_dataset(tweets, config_.normalization, config_.threads);
    write_normalized_jsonl(paths_.normalized(), normalized);
    return {{"input", tweets.size()},
            {"retained", normalized.size()},
            {"dropped_short", tweets.size() - normalized.size()}};
  }

  Counts split() {
    const auto dataset = read_labeled_jsonl(paths_.normalized(), config_.taxonomy);
    const auto result = stratified_split(dataset, config_.split);
    write_labeled_jsonl(paths_.train(), result.train);
    write_labeled_jsonl(paths_.test(), result.test);

    json excluded = json::array();
    if (fs::exists(paths_.adjudication())) {
      excluded = json::parse(read_file(paths_.adjudication())).value("excluded_ids", json::array());
    }
    ojson manifest;
    manifest["seed"] = result.seed;
    manifest["ratio"] = result.test_ratio;
    manifest["exact_total"] = config_.split.exact_total;
    manifest["classes"] = config_.taxonomy.names();
    manifest["train_counts"] = result.train_counts;
    manifest["test_counts"] = result.test_counts;
    manifest["excluded_ids"] = excluded;
    manifest["notices"] = result.notices;
    write_file(paths_.split(), manifest.dump(2) + "\n");
    return {{"train", result.train.items.size()}, {"test", result.test.items.size()}};
  }

  Counts augment() {
    auto train = read_labeled_jsonl(paths_.train(), config_.taxonomy);
    auto test = read_labeled_jsonl(paths_.test(), config_.taxonomy);
    const auto& settings = config_.augmentation;
    if (!settings.enabled) {
      write_labeled_jsonl(paths_.eval(), test);
      return {{"train", train.items.size()}, {"eval", test.items.size()}, {"synthetic", 0}};
    }

    auto filler = make_mask_filler(settings.backend);
    std::unique_ptr<WordInserter> inserter;
    if (settings.backend.kind == BackendKind::kStub) {
      inserter = std::make_unique<StubInserter>();
    } else {
      inserter = std::make_unique<MaskFillInserter>(*filler, settings.top_k);
    }

    const std::size_t before = train.items.size() + test.items.size();
    const auto train_plan = balance_plan(class_distribution(train));
    train = apply_plan(train, train_plan, *inserter, derive_seed(settings.seed, 0));
    ojson plans;
    plans["train"] = json::parse(plan_to_json(train_plan, config_.taxonomy));
    if (!settings.train_only) {
      const auto test_plan = balance_plan(class_distribution(test));
      test = apply_plan(test, test_plan, *inserter, derive_seed(settings.seed, 1));
      plans["test"] = json::parse(plan_to_json(test_plan, config_.taxonomy));
      write_labeled_jsonl(paths_.test_aug(), test);
    }
    plans["train_only"] = settings.train_only;
    write_labeled_jsonl(paths_.train_aug(), train);
    write_labeled_jsonl(paths_.eval(), test);
    write_file(paths_.augment(), plans.dump(2) + "\n");
    return {{"train", train.items.size()},
            {"eval", test.items.size()},
            {"synthetic", train.items.size() + test.items.size() - before}};
  }

  Counts classify() {
    const auto eval = read_labeled_jsonl(paths_.eval(), config_.taxonomy);
    std::vector<TextItem> items;
    items.reserve(eval.items.size());
    for (const auto& item : eval.items) items.push_back({item.id, join_tokens(item.tokens)});
    for (const auto& model : config_.models) {
      auto backend = make_classifier(model, config_.taxonomy);
      auto matrix = backend->classify_batch(items);
      validate_matrix(matrix, config_.taxonomy);
      write_probability_csv(paths_.probs(backend->model_id()), matrix);
    }
    return {{"models", config_.models.size()}, {"rows", items.size()}};
  }

  Counts fuse_stage() {
    std::vector<ProbabilityMatrix> matrices;
    for (const auto& model : config_.models) {
      const auto id = model_id_of(model);
      matrices.push_back(read_probability_csv(paths_.probs(id), id));
      validate_matrix(matrices.back(), config_.taxonomy);
    }
    const auto fused = fuse(matrices, EnsembleConfig{config_.weights});
    const auto predictions = argmax_labels(fused, config_.taxonomy);
    write_probability_csv(paths_.fused(), fused);
    write_predictions_tsv(paths_.predictions(), predictions, config_.taxonomy);
    return {{"models", matrices.size()}, {"rows", predictions.size()}};
  }

  Counts evaluate_stage() {
    const auto eval = read_labeled_jsonl(paths_.eval(), config_.taxonomy);
    const auto predictions = read_predictions_tsv(paths_.predictions(), config_.taxonomy);
    std::vector<GoldLabel> gold;
    gold.reserve(eval.items.size());
    for (const auto& item : eval.items) gold.push_back({item.id, item.label});
    const auto cm = confusion(gold, predictions, config_.taxonomy);
    const auto report = evaluate(cm);
    write_file(paths_.report_json(), report_to_json(report));
    write_file(paths_.report_txt(), render_report(report, ReportFormat::kTable));
    write_file(paths_.confusion(), confusion_to_csv(cm));
    return {{"pairs", cm.total()}, {"correct", cm.trace()}};
  }

  std::string model_id_of(const BackendDescriptor& d) const {
    // Must agree with make_classifier's defaults.
    if (!d.model_id.empty()) return d.model_id;
    if (d.kind == BackendKind::kStub) return "stub";
    if (d.kind == BackendKind::kHttp) return "http";
    return fs::path(d.location).stem().string();
  }

  const PipelineConfig& config_;
  Paths paths_;
};

std::optional<StageRecord> previous_record(const std::string& manifest_path, Stage stage) {
  if (!fs::exists(manifest_path)) return std::nullopt;
  try {
    const auto doc = ojson::parse(read_file(manifest_path));
    for (const auto& s : doc.at("stages")) {
      if (s.at("name").get<std::string>() != to_string(stage)) continue;
      StageRecord r{stage, {}, true};
      for (const auto& [k, v] : s.at("counts").items()) r.counts.emplace_back(k, v.get<std::uint64_t>());
      return r;
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kAdjudicate: return "adjudicate";
    case Stage::kNormalize: return "normalize";
    case Stage::kSplit: return "split";
    case Stage::kAugment: return "augment";
    case Stage::kClassify: return "classify";
    case Stage::kFuse: return "fuse";
    case Stage::kEvaluate: return "evaluate";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorKind::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
}

int exit_code(Stage stage) { return 11 + static_cast<int>(stage); }

StageFailure::StageFailure(Stage stage, ErrorKind kind, const std::string& message)
    : std::runtime_error("stage '" + std::string(to_string(stage)) + "' failed: " + message),
      stage_(stage),
      kind_(kind) {}

std::vector<BackendDescriptor> default_ensemble_models() {
  return {{BackendKind::kStub, "", "aubmindlab/bert-base-arabertv02-twitter"},
          {BackendKind::kStub, "", "CAMeL-Lab/bert-base-arabic-camelbert-mix"},
          {BackendKind::kStub, "", "UBC-NLP/MARBERTv2"},
          {BackendKind::kStub, "", "qarib/bert-base-qarib"}};
}

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidConfig, std::string("pipeline config: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kInvalidConfig, "pipeline config must be an object");

  PipelineConfig c;
  try {
    c.input = resolve(base_dir, doc.at("input").get<std::string>());
    c.output_dir = resolve(base_dir, doc.value("output_dir", std::string("tweetact-out")));
    if (auto it = doc.find("taxonomy"); it != doc.end()) {
      const auto names = it->get<std::vector<std::string>>();
      if (names != Taxonomy::speech_acts().names()) c.taxonomy = Taxonomy(names);
    }
    c.adjudicate = doc.value("adjudicate", true);
    if (auto it = doc.find("normalization"); it != doc.end()) {
      c.normalization = it->is_string()
                            ? load_normalization_config(resolve(base_dir, it->get<std::string>()))
                            : parse_normalization_config(it->dump());
    }
    if (auto it = doc.find("split"); it != doc.end()) {
      c.split.test_ratio = it->value("ratio", c.split.test_ratio);
      c.split.seed = it->value("seed", c.split.seed);
      c.split.exact_total = it->value("exact_total", c.split.exact_total);
    }
    if (auto it = doc.find("augmentation"); it != doc.end()) {
      auto& a = c.augmentation;
      a.enabled = it->value("enabled", a.enabled);
      a.train_only = it->value("train_only", a.train_only);
      a.seed = it->value("seed", a.seed);
      a.top_k = it->value("top_k", a.top_k);
      if (auto b = it->find("backend"); b != it->end()) a.backend = parse_descriptor(*b, base_dir);
    }
    if (auto it = doc.find("models"); it != doc.end()) {
      for (const auto& m : *it) c.models.push_back(parse_descriptor(m, base_dir));
    } else {
      c.models = default_ensemble_models();
    }
    if (auto it = doc.find("ensemble"); it != doc.end()) {
      c.weights = it->value("weights", std::vector<double>{});
    }
    c.threads = doc.value("threads", 1U);
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidConfig, std::string("pipeline config: ") + e.what());
  }

  if (c.models.empty()) fail(ErrorKind::kInvalidConfig, "at least one model is required");
  if (!c.weights.empty() && c.weights.size() != c.models.size()) {
    fail(ErrorKind::kInvalidConfig, std::to_string(c.weights.size()) + " weights for " +
                                        std::to_string(c.models.size()) + " models");
  }
  for (double w : c.weights) {
    if (!(w > 0.0)) fail(ErrorKind::kInvalidConfig, "ensemble weights must be positive");
  }
  if (!(c.split.test_ratio > 0.0 && c.split.test_ratio < 1.0)) {
    fail(ErrorKind::kInvalidConfig, "split ratio must lie in (0, 1)");
  }

  json canonical = {{"taxonomy", c.taxonomy.names()},
                    {"adjudicate", c.adjudicate},
                    {"normalization", json::parse(to_json(c.normalization))},
                    {"split", {{"ratio", c.split.test_ratio},
                               {"seed", c.split.seed},
                               {"exact_total", c.split.exact_total}}},
                    {"augmentation", {{"enabled", c.augmentation.enabled},
                                      {"train_only", c.augmentation.train_only},
                                      {"seed", c.augmentation.seed},
                                      {"top_k", c.augmentation.top_k},
                                      {"backend", descriptor_json(c.augmentation.backend)}}},
                    {"weights", c.weights},
                    {"threads", c.threads}};
  json models = json::array();
  for (const auto& m : c.models) models.push_back(descriptor_json(m));
  canonical["models"] = models;
  c.canonical = canonical.dump();
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kInvalidConfig, "cannot open pipeline config '" + path + "'");
  const auto base = fs::path(path).parent_path().string();
  return parse_pipeline_config(read_file(path), base.empty() ? "." : base);
}

std::string manifest_to_json(const RunManifest& m) {
  ojson doc;
  doc["tool_version"] = m.tool_version;
  doc["config_sha256"] = m.config_sha256;
  ojson inputs = ojson::array();
  for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"sha256", digest}});
  doc["inputs"] = inputs;
  ojson stages = ojson::array();
  for (const auto& s : m.stages) {
    ojson counts = ojson::object();
    for (const auto& [k, v] : s.counts) counts[k] = v;
    ojson entry = {{"name", std::string(to_string(s.stage))}, {"counts", counts}};
    if (s.resumed) entry["resumed"] = true;
    stages.push_back(entry);
  }
  doc["stages"] = stages;
  doc["status"] = m.status;
  if (m.failed_stage) {
    doc["failed_stage"] = std::string(to_string(*m.failed_stage));
    doc["error"] = m.error;
  }
  doc["started_at"] = m.started_at;
  doc["finished_at"] = m.finished_at;
  return doc.dump(2, ' ', false, ojson::error_handler_t::replace) + "\n";
}

RunManifest run_pipeline(const PipelineConfig& config, std::optional<Stage> from) {
  const Stage first = from.value_or(Stage::kAdjudicate);
  const Paths paths{config.output_dir};

  if (first == Stage::kAdjudicate && !fs::exists(config.input)) {
    fail(ErrorKind::kIo, "input file '" + config.input + "' does not exist");
  }
  for (const auto& m : config.models) {
    if (m.kind == BackendKind::kFile && !fs::exists(m.location)) {
      fail(ErrorKind::kIo, "model file '" + m.location + "' does not exist");
    }
  }
  if (config.output_dir.empty()) fail(ErrorKind::kInvalidConfig, "output_dir is empty");
  fs::create_directories(config.output_dir);

  RunManifest manifest;
  manifest.tool_version = std::string(tool_version());
  manifest.config_sha256 = sha256_hex(config.canonical);
  manifest.started_at = utc_now();
  if (fs::exists(config.input)) manifest.inputs.emplace_back(config.input, sha256_file(config.input));
  for (const auto& m : config.models) {
    if (m.kind == BackendKind::kFile) manifest.inputs.emplace_back(m.location, sha256_file(m.location));
  }

  PipelineRun run(config);
  for (Stage stage : kAllStages) {
    if (stage < first) {
      if (auto r = previous_record(paths.manifest(), stage)) {
        manifest.stages.push_back(*r);
      } else {
        manifest.stages.push_back({stage, {}, true});
      }
      continue;
    }
    try {
      manifest.stages.push_back({stage, run.run(stage), false});
    } catch (const std::exception& e) {
      const ErrorKind kind = [&] {
        if (const auto* err = dynamic_cast<const Error*>(&e)) return err->kind();
        return ErrorKind::kIo;
      }();
      manifest.status = "failed";
      manifest.failed_stage = stage;
      manifest.error = e.what();
      manifest.finished_at = utc_now();
      write_file(paths.manifest(), manifest_to_json(manifest));
      throw StageFailure(stage, kind, e.what());
    }
  }
  manifest.status = "ok";
  manifest.finished_at = utc_now();
  write_file(paths.manifest(), manifest_to_json(manifest));
  return manifest;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kIo, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string_view tool_version() { return TWEETACT_VERSION; }

}  // namespace tweetact
