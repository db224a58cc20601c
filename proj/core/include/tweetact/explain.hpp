#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetact/backends.hpp"
#include "tweetact/normalize.hpp"
#include "tweetact/taxonomy.hpp"

namespace tweetact {

// Bag-of-words view of a token sequence: unique words in order of first
// appearance, and for every token the index of its word.
struct TextFeatures {
  std::vector<std::string> tokens;
  std::vector<std::string> words;
  std::vector<std::size_t> token_word;

  static TextFeatures from_tokens(std::vector<std::string> tokens);
  // Tokens whose word is masked out are removed.
  std::string reconstruct(std::span<const std::uint8_t> mask) const;
};

struct PerturbationSample {
  std::vector<std::uint8_t> mask;  // 1 = word kept
  std::string text;
  double proximity = 1.0;
};

inline constexpr double kDefaultKernelWidth = 25.0;

// exp(-d^2 / width^2), d = cosine distance between the mask and all-ones.
// An all-zero mask has distance 1.
double proximity_weight(std::span<const std::uint8_t> mask,
                        double kernel_width = kDefaultKernelWidth);

// Sample 0 keeps every word. Each later sample drops k words, k uniform in
// [1, d], chosen by a partial Fisher-Yates draw over word indices.
std::vector<PerturbationSample> perturb(const TextFeatures& features, std::size_t n_samples,
                                        std::uint64_t seed,
                                        double kernel_width = kDefaultKernelWidth);

// All 2^d masks: all-ones first, then binary counting from all-zeros
// (bit j = word j). Throws kInvalidArgument above 24 words.
std::vector<PerturbationSample> enumerate_masks(const TextFeatures& features,
                                                double kernel_width = kDefaultKernelWidth);

struct SurrogateFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// Minimizes sum_i w_i (y_i - b0 - b . x_i)^2 + lambda |b|^2 (intercept not
// penalized) by forming the normal equations and solving them with Gaussian
// elimination under partial (row) pivoting. Throws kSingularSystem when a
// pivot vanishes relative to the matrix scale; kInvalidArgument when there
// are fewer than d + 1 samples or lambda < 0.
SurrogateFit fit_surrogate(std::span<const PerturbationSample> samples,
                           std::span<const double> targets, double ridge_lambda);

struct WordWeight {
  std::string word;
  double coefficient = 0.0;
  std::size_t position = 0;  // index into TextFeatures::words
};

// Largest |coefficient| first; ties keep the earlier word.
std::vector<WordWeight> top_k_words(std::span<const std::string> words,
                                    std::span<const double> coefficients, std::size_t k);

struct ExplainOptions {
  std::optional<std::string> target_class;  // default: argmax on the full text
  std::size_t k = 7;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  double ridge_lambda = 1e-3;
  double kernel_width = kDefaultKernelWidth;
  // Enumerate every mask when the text has at most this many unique words.
  std::size_t exhaustive_limit = 12;
  NormalizationConfig normalization;
};

struct Explanation {
  ClassIndex target;
  std::string target_class;
  std::vector<std::string> class_names;
  std::vector<double> class_probabilities;
  std::vector<std::string> words;
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::vector<WordWeight> top_k;
  std::size_t samples = 0;
  bool exhaustive = false;
};

// Throws kTooShort when the text normalizes to no words and
// kBackendFailure when the classifier fails.
Explanation explain(std::string_view text, ClassifierBackend& backend, const Taxonomy& taxonomy,
                    const ExplainOptions& options = {});

std::string explanation_to_json(const Explanation& explanation);
// Text bar chart of the top-k coefficients plus the class probabilities.
std::string render_bars(const Explanation& explanation, std::size_t width = 40);

}  // namespace tweetact
