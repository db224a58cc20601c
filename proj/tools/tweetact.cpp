// tweetact: command-line front end for the speech-act toolkit.
//
// Every subcommand reads and writes files named by flags. `run` chains the
// whole pipeline from a JSON config and exits with the failing stage's code
// (see pipeline.hpp or the README table).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tweetact/augment.hpp"
#include "tweetact/backends.hpp"
#include "tweetact/dataset.hpp"
#include "tweetact/ensemble.hpp"
#include "tweetact/error.hpp"
#include "tweetact/explain.hpp"
#include "tweetact/io.hpp"
#include "tweetact/metrics.hpp"
#include "tweetact/normalize.hpp"
#include "tweetact/pipeline.hpp"
#include "tweetact/report.hpp"
#include "tweetact/rng.hpp"

namespace {

using namespace tweetact;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Error raised inside a subcommand, tagged with the exit code to use.
struct CommandError {
  int code;
  std::string message;
};

int code_for(ErrorKind kind, int stage_code) {
  return kind == ErrorKind::kInvalidConfig ? kExitConfig : stage_code;
}

template <typename F>
void guarded(int stage_code, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    throw CommandError{code_for(e.kind(), stage_code), e.what()};
  } catch (const std::exception& e) {
    throw CommandError{stage_code, e.what()};
  }
}

Taxonomy taxonomy_from(const std::string& list) {
  return list.empty() ? Taxonomy::speech_acts() : parse_taxonomy_list(list);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

BackendDescriptor backend_from(const std::string& kind, const std::string& url,
                               const std::string& model_id) {
  BackendDescriptor d;
  d.kind = parse_backend_kind(kind);
  d.location = url;
  d.model_id = model_id;
  return d;
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::kInvalidArgument, "bad weight '" + item + "'");
    }
  }
  return out;
}

// "Ass=Exp,Rec=Req" or a JSON object file. Classes not named map to
// themselves.
std::map<std::string, std::string> parse_merge_map(const std::string& arg, const Taxonomy& tax) {
  std::map<std::string, std::string> out;
  for (const auto& n : tax.names()) out[n] = n;
  auto put = [&](const std::string& from, const std::string& to) {
    out[tax.name(tax.index_of(from))] = to;
  };
  if (std::filesystem::exists(arg)) {
    const auto doc = json::parse(read_file(arg));
    for (const auto& [k, v] : doc.items()) put(k, v.get<std::string>());
    return out;
  }
  std::stringstream ss(arg);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      fail(ErrorKind::kInvalidArgument, "merge entry '" + pair + "' is not FROM=TO");
    }
    put(pair.substr(0, eq), pair.substr(eq + 1));
  }
  return out;
}

std::string distribution_json(const Taxonomy& tax, const ClassDistribution& dist) {
  ojson doc;
  doc["total"] = dist.total;
  ojson counts = ojson::object();
  for (std::size_t c = 0; c < tax.size(); ++c) counts[tax.name(ClassIndex{c})] = dist.counts[c];
  doc["counts"] = counts;
  return doc.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arabic tweet speech-act toolkit"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string classes;
  app.add_option("--classes", classes, "Comma-separated taxonomy (default Exp,Que,Req,Ass,Rec,Oth)");

  // adjudicate
  std::string adj_in, adj_out, adj_report;
  auto* adj = app.add_subcommand("adjudicate", "Majority vote over three annotator labels");
  adj->add_option("--in", adj_in, "Tweets JSONL with votes")->required();
  adj->add_option("--out", adj_out, "Adjudicated tweets JSONL")->required();
  adj->add_option("--report", adj_report, "Exclusion report JSON (default stdout)");

  // normalize
  std::string norm_in, norm_out, norm_config;
  unsigned norm_threads = 1;
  auto* norm = app.add_subcommand("normalize", "Clean and tokenize tweets");
  norm->add_option("--in", norm_in, "Tweets JSONL")->required();
  norm->add_option("--out", norm_out, "Normalized JSONL")->required();
  norm->add_option("--config", norm_config, "NormalizationConfig JSON");
  norm->add_option("--threads", norm_threads, "Worker threads")->check(CLI::PositiveNumber);

  // split
  std::string split_in, split_train, split_test, split_manifest;
  double split_ratio = 0.2;
  std::uint64_t split_seed = 42;
  bool split_exact = false;
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("--in", split_in, "Labeled JSONL")->required();
  split->add_option("--train", split_train, "Train JSONL")->required();
  split->add_option("--test", split_test, "Test JSONL")->required();
  split->add_option("--manifest", split_manifest, "Split manifest JSON (default stdout)");
  split->add_option("--ratio", split_ratio, "Test fraction")->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", split_seed, "Shuffle seed");
  split->add_flag("--exact-total", split_exact, "Force overall test size to round(ratio*N)");

  // stats
  std::string stats_in;
  auto* stats = app.add_subcommand("stats", "Per-class counts of a labeled JSONL file");
  stats->add_option("--in", stats_in, "Labeled JSONL")->required();

  // merge-classes
  std::string merge_in, merge_out, merge_map;
  auto* merge = app.add_subcommand("merge-classes", "Relabel through a class map");
  merge->add_option("--in", merge_in, "Labeled JSONL")->required();
  merge->add_option("--out", merge_out, "Relabeled JSONL")->required();
  merge->add_option("--map", merge_map, "FROM=TO,... or a JSON object file")->required();

  // augment
  auto* aug = app.add_subcommand("augment", "Class-balancing augmentation");
  aug->require_subcommand(1);
  std::string plan_in, plan_out;
  auto* aug_plan = aug->add_subcommand("plan", "Compute per-class deficits");
  aug_plan->add_option("--in", plan_in, "Labeled JSONL")->required();
  aug_plan->add_option("--out", plan_out, "Plan JSON (default stdout)");

  std::string apply_train, apply_test, apply_train_out, apply_test_out, apply_backend = "stub",
                                                                          apply_url;
  std::uint64_t apply_seed = 7;
  std::size_t apply_top_k = 5;
  bool apply_train_only = false;
  auto* aug_apply = aug->add_subcommand("apply", "Balance each set by word insertion");
  aug_apply->add_option("--train", apply_train, "Train JSONL")->required();
  aug_apply->add_option("--train-out", apply_train_out, "Augmented train JSONL")->required();
  aug_apply->add_option("--test", apply_test, "Test JSONL");
  aug_apply->add_option("--test-out", apply_test_out, "Augmented test JSONL");
  aug_apply->add_option("--backend", apply_backend, "stub or http")
      ->check(CLI::IsMember({"stub", "http"}));
  aug_apply->add_option("--url", apply_url, "Backend base URL (else TWEETACT_BACKEND_URL)");
  aug_apply->add_option("--seed", apply_seed, "Augmentation seed");
  aug_apply->add_option("--top-k", apply_top_k, "Candidates requested per slot")
      ->check(CLI::PositiveNumber);
  aug_apply->add_flag("--train-only", apply_train_only, "Leave the test set untouched");

  // predict
  std::vector<std::string> pred_probs;
  std::string pred_weights, pred_out, pred_fused;
  auto* pred = app.add_subcommand("predict", "Fuse per-model probabilities and take the argmax");
  pred->add_option("--probs", pred_probs, "Probability CSV per model")->required()->expected(1, -1);
  pred->add_option("--weights", pred_weights, "w1,w2,... (default uniform)");
  pred->add_option("--out", pred_out, "Predictions TSV (default stdout)");
  pred->add_option("--fused", pred_fused, "Also write the fused probability CSV");

  // evaluate
  std::string eval_gold, eval_pred, eval_out, eval_confusion;
  auto* eval = app.add_subcommand("evaluate", "Precision, recall, F1 and accuracy");
  eval->add_option("--gold", eval_gold, "Labeled JSONL")->required();
  eval->add_option("--pred", eval_pred, "Predictions TSV")->required();
  eval->add_option("--out", eval_out, "Report JSON (default: table on stdout only)");
  eval->add_option("--confusion", eval_confusion, "Confusion matrix CSV");

  // explain
  std::string ex_text, ex_backend = "stub", ex_url, ex_model, ex_class, ex_out;
  ExplainOptions ex_opts;
  bool ex_bars = false;
  auto* ex = app.add_subcommand("explain", "Local surrogate explanation of one tweet");
  ex->add_option("--text", ex_text, "Tweet text")->required();
  ex->add_option("--backend", ex_backend, "stub or http")->check(CLI::IsMember({"stub", "http"}));
  ex->add_option("--url", ex_url, "Backend base URL (else TWEETACT_BACKEND_URL)");
  ex->add_option("--model", ex_model, "Model id");
  ex->add_option("--class", ex_class, "Class to explain (default: predicted)");
  ex->add_option("--k", ex_opts.k, "Words reported")->check(CLI::PositiveNumber);
  ex->add_option("--seed", ex_opts.seed, "Perturbation seed");
  ex->add_option("--samples", ex_opts.n_samples, "Perturbations when not exhaustive");
  ex->add_option("--lambda", ex_opts.ridge_lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);
  ex->add_option("--out", ex_out, "Explanation JSON (default stdout)");
  ex->add_flag("--bars", ex_bars, "Print a text bar chart to stderr");

  // run
  std::string run_config, run_from;
  auto* run = app.add_subcommand("run", "Full pipeline from a JSON config");
  run->add_option("--config", run_config, "Pipeline config JSON")->required();
  run->add_option("--from", run_from, "Resume at this stage");

  // report
  std::string rep_in, rep_format = "table";
  auto* rep = app.add_subcommand("report", "Render a report JSON");
  rep->add_option("--in", rep_in, "Report JSON")->required();
  rep->add_option("--format", rep_format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    Taxonomy tax;
    try {
      tax = taxonomy_from(classes);
    } catch (const Error& e) {
      throw CommandError{kExitUsage, e.what()};
    }

    if (*adj) {
      guarded(exit_code(Stage::kAdjudicate), [&] {
        const auto tweets = read_tweets_jsonl(adj_in);
        const auto result = adjudicate_dataset(tweets, tax);
        write_tweets_jsonl(adj_out, result.tweets);
        ojson rep_doc;
        rep_doc["input"] = tweets.size();
        rep_doc["retained"] = result.tweets.size();
        rep_doc["excluded_ids"] = result.report.excluded_ids;
        emit(adj_report, rep_doc.dump(2) + "\n");
      });
    } else if (*norm) {
      guarded(exit_code(Stage::kNormalize), [&] {
        const NormalizationConfig cfg =
            norm_config.empty() ? NormalizationConfig{} : load_normalization_config(norm_config);
        const auto tweets = read_tweets_jsonl(norm_in);
        const auto out = normalize_dataset(tweets, cfg, norm_threads);
        write_normalized_jsonl(norm_out, out);
        std::cerr << "normalized " << out.size() << " of " << tweets.size() << " tweets\n";
      });
    } else if (*split) {
      guarded(exit_code(Stage::kSplit), [&] {
        const auto ds = read_labeled_jsonl(split_in, tax);
        const auto result = stratified_split(ds, {split_ratio, split_seed, split_exact});
        write_labeled_jsonl(split_train, result.train);
        write_labeled_jsonl(split_test, result.test);
        ojson m;
        m["seed"] = result.seed;
        m["ratio"] = result.test_ratio;
        m["exact_total"] = split_exact;
        m["classes"] = tax.names();
        m["train_counts"] = result.train_counts;
        m["test_counts"] = result.test_counts;
        m["excluded_ids"] = json::array();
        m["notices"] = result.notices;
        emit(split_manifest, m.dump(2) + "\n");
      });
    } else if (*stats) {
      guarded(exit_code(Stage::kSplit), [&] {
        const auto ds = read_labeled_jsonl(stats_in, tax);
        std::cout << distribution_json(tax, class_distribution(ds));
      });
    } else if (*merge) {
      guarded(exit_code(Stage::kSplit), [&] {
        const auto ds = read_labeled_jsonl(merge_in, tax);
        const auto merged = merge_classes(ds, parse_merge_map(merge_map, tax));
        write_labeled_jsonl(merge_out, merged);
        std::cout << distribution_json(merged.taxonomy, class_distribution(merged));
      });
    } else if (*aug_plan) {
      guarded(exit_code(Stage::kAugment), [&] {
        const auto ds = read_labeled_jsonl(plan_in, tax);
        emit(plan_out, plan_to_json(balance_plan(class_distribution(ds)), tax));
      });
    } else if (*aug_apply) {
      guarded(exit_code(Stage::kAugment), [&] {
        if (!apply_train_only && apply_test.empty() != apply_test_out.empty()) {
          fail(ErrorKind::kInvalidArgument, "--test and --test-out go together");
        }
        const auto descriptor = backend_from(apply_backend, apply_url, {});
        auto filler = make_mask_filler(descriptor);
        std::unique_ptr<WordInserter> inserter;
        if (descriptor.kind == BackendKind::kStub) {
          inserter = std::make_unique<StubInserter>();
        } else {
          inserter = std::make_unique<MaskFillInserter>(*filler, apply_top_k);
        }
        const auto train = read_labeled_jsonl(apply_train, tax);
        const auto out = apply_plan(train, balance_plan(class_distribution(train)), *inserter,
                                    derive_seed(apply_seed, 0));
        write_labeled_jsonl(apply_train_out, out);
        std::cerr << "train: " << train.items.size() << " -> " << out.items.size() << '\n';
        if (!apply_train_only && !apply_test.empty()) {
          const auto test = read_labeled_jsonl(apply_test, tax);
          const auto test_out = apply_plan(test, balance_plan(class_distribution(test)),
                                           *inserter, derive_seed(apply_seed, 1));
          write_labeled_jsonl(apply_test_out, test_out);
          std::cerr << "test: " << test.items.size() << " -> " << test_out.items.size() << '\n';
        }
      });
    } else if (*pred) {
      guarded(exit_code(Stage::kFuse), [&] {
        std::vector<ProbabilityMatrix> matrices;
        for (const auto& p : pred_probs) {
          matrices.push_back(read_probability_csv(p));
          validate_matrix(matrices.back(), tax);
        }
        const auto fused = fuse(matrices, EnsembleConfig{parse_weights(pred_weights)});
        const auto labels = argmax_labels(fused, tax);
        if (!pred_fused.empty()) write_probability_csv(pred_fused, fused);
        if (pred_out.empty()) {
          write_predictions_tsv(std::cout, labels, tax);
        } else {
          write_predictions_tsv(pred_out, labels, tax);
        }
      });
    } else if (*eval) {
      guarded(exit_code(Stage::kEvaluate), [&] {
        const auto ds = read_labeled_jsonl(eval_gold, tax);
        const auto preds = read_predictions_tsv(eval_pred, tax);
        std::vector<GoldLabel> gold;
        for (const auto& item : ds.items) gold.push_back({item.id, item.label});
        const auto cm = confusion(gold, preds, tax);
        const auto report = evaluate(cm);
        if (!eval_out.empty()) write_file(eval_out, report_to_json(report));
        if (!eval_confusion.empty()) write_file(eval_confusion, confusion_to_csv(cm));
        std::cout << render_report(report, ReportFormat::kTable);
      });
    } else if (*ex) {
      guarded(kExitRuntime, [&] {
        const auto descriptor = backend_from(ex_backend, ex_url, ex_model);
        auto backend = make_classifier(descriptor, tax);
        if (!ex_class.empty()) ex_opts.target_class = ex_class;
        const auto explanation = explain(ex_text, *backend, tax, ex_opts);
        emit(ex_out, explanation_to_json(explanation));
        if (ex_bars) std::cerr << render_bars(explanation);
      });
    } else if (*rep) {
      guarded(kExitRuntime, [&] {
        std::cout << render_report(read_file(rep_in), parse_report_format(rep_format));
      });
    } else if (*run) {
      PipelineConfig config;
      std::optional<Stage> from;
      try {
        config = load_pipeline_config(run_config);
        if (!run_from.empty()) from = parse_stage(run_from);
      } catch (const Error& e) {
        throw CommandError{e.kind() == ErrorKind::kInvalidArgument ? kExitUsage : kExitConfig,
                           e.what()};
      }
      try {
        const auto manifest = run_pipeline(config, from);
        for (const auto& s : manifest.stages) {
          std::cerr << to_string(s.stage) << (s.resumed ? " (reused)" : "") << ':';
          for (const auto& [k, v] : s.counts) std::cerr << ' ' << k << '=' << v;
          std::cerr << '\n';
        }
      } catch (const StageFailure& e) {
        throw CommandError{exit_code(e.stage()), e.what()};
      } catch (const Error& e) {
        // Raised before any stage starts.
        throw CommandError{kExitConfig, e.what()};
      }
    }
  } catch (const CommandError& e) {
    std::cerr << "tweetact: " << e.message << '\n';
    return e.code;
  }
  return kExitOk;
}
