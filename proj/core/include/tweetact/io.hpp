#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetact/ensemble.hpp"
#include "tweetact/types.hpp"

namespace tweetact {

// JSON-lines tweets: {"id", "text", "label"?, "votes"?: [3 strings]}.
// Labeled rows written by this library add "source_id" on synthetic items.
std::vector<RawTweet> read_tweets_jsonl(std::istream& in, std::string_view source = "<stream>");
std::vector<RawTweet> read_tweets_jsonl(const std::string& path);
void write_tweets_jsonl(std::ostream& out, std::span<const RawTweet> tweets);
void write_tweets_jsonl(const std::string& path, std::span<const RawTweet> tweets);

void write_normalized_jsonl(std::ostream& out, std::span<const NormalizedTweet> tweets);
void write_normalized_jsonl(const std::string& path, std::span<const NormalizedTweet> tweets);

// Tokens are the whitespace-split "text" field; labels resolve through the
// taxonomy (aliases accepted).
LabeledDataset read_labeled_jsonl(std::istream& in, const Taxonomy& taxonomy,
                                  std::string_view source = "<stream>");
LabeledDataset read_labeled_jsonl(const std::string& path, const Taxonomy& taxonomy);
void write_labeled_jsonl(std::ostream& out, const LabeledDataset& dataset);
void write_labeled_jsonl(const std::string& path, const LabeledDataset& dataset);

// CSV with header `id,<class1>,...,<classC>`. Fields may be RFC 4180 quoted.
ProbabilityMatrix read_probability_csv(std::istream& in, std::string model_id);
ProbabilityMatrix read_probability_csv(const std::string& path, std::string model_id = {});
void write_probability_csv(std::ostream& out, const ProbabilityMatrix& matrix);
void write_probability_csv(const std::string& path, const ProbabilityMatrix& matrix);

// TSV `id<TAB>label<TAB>score`, no header.
std::vector<Prediction> read_predictions_tsv(std::istream& in, const Taxonomy& taxonomy);
std::vector<Prediction> read_predictions_tsv(const std::string& path, const Taxonomy& taxonomy);
void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions,
                           const Taxonomy& taxonomy);
void write_predictions_tsv(const std::string& path, std::span<const Prediction> predictions,
                           const Taxonomy& taxonomy);

std::vector<std::string> split_whitespace(std::string_view text);
std::vector<std::string> parse_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
// Shortest round-trip decimal form.
std::string format_double(double value);

std::string read_file(const std::string& path);
// Creates parent directories as needed.
void write_file(const std::string& path, std::string_view content);

}  // namespace tweetact
