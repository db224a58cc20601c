#include "tweetact/explain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "tweetact/ensemble.hpp"
#include "tweetact/error.hpp"
#include "tweetact/rng.hpp"

namespace tweetact {
namespace {

constexpr double kPivotTolerance = 1e-12;
constexpr std::size_t kMaxEnumeratedWords = 24;

PerturbationSample make_sample(const TextFeatures& features, std::vector<std::uint8_t> mask,
                               double kernel_width) {
  PerturbationSample s;
  s.text = features.reconstruct(mask);
  s.proximity = proximity_weight(mask, kernel_width);
  s.mask = std::move(mask);
  return s;
}

}  // namespace

TextFeatures TextFeatures::from_tokens(std::vector<std::string> tokens) {
  TextFeatures f;
  std::unordered_map<std::string, std::size_t> index;
  f.token_word.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto [it, inserted] = index.emplace(t, f.words.size());
    if (inserted) f.words.push_back(t);
    f.token_word.push_back(it->second);
  }
  f.tokens = std::move(tokens);
  return f;
}

std::string TextFeatures::reconstruct(std::span<const std::uint8_t> mask) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!mask[token_word[i]]) continue;
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

double proximity_weight(std::span<const std::uint8_t> mask, double kernel_width) {
  if (mask.empty()) fail(ErrorKind::kInvalidArgument, "proximity of an empty mask");
  const auto kept = static_cast<double>(std::count_if(mask.begin(), mask.end(),
                                                      [](std::uint8_t b) { return b != 0; }));
  // cos(mask, 1) = kept / (sqrt(kept) * sqrt(d)) = sqrt(kept / d)
  const double cosine = kept == 0.0 ? 0.0 : std::sqrt(kept / static_cast<double>(mask.size()));
  const double distance = 1.0 - cosine;
  return std::exp(-(distance * distance) / (kernel_width * kernel_width));
}

std::vector<PerturbationSample> perturb(const TextFeatures& features, std::size_t n_samples,
                                        std::uint64_t seed, double kernel_width) {
  const std::size_t d = features.words.size();
  if (d == 0) fail(ErrorKind::kInvalidArgument, "perturb needs at least one word");
  if (n_samples == 0) fail(ErrorKind::kInvalidArgument, "perturb needs n_samples >= 1");

  std::vector<PerturbationSample> out;
  out.reserve(n_samples);
  out.push_back(make_sample(features, std::vector<std::uint8_t>(d, 1), kernel_width));

  Rng rng(seed);
  std::vector<std::size_t> order(d);
  for (std::size_t s = 1; s < n_samples; ++s) {
    const std::size_t drop = 1 + static_cast<std::size_t>(rng.uniform(d));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint8_t> mask(d, 1);
    for (std::size_t k = 0; k < drop; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.uniform(d - k));
      std::swap(order[k], order[j]);
      mask[order[k]] = 0;
    }
    out.push_back(make_sample(features, std::move(mask), kernel_width));
  }
  return out;
}

std::vector<PerturbationSample> enumerate_masks(const TextFeatures& features, double kernel_width) {
  const std::size_t d = features.words.size();
  if (d == 0) fail(ErrorKind::kInvalidArgument, "enumerate_masks needs at least one word");
  if (d > kMaxEnumeratedWords) {
    fail(ErrorKind::kInvalidArgument, std::to_string(d) + " words is too many to enumerate");
  }
  const std::uint64_t all = (std::uint64_t{1} << d) - 1;
  std::vector<PerturbationSample> out;
  out.reserve(static_cast<std::size_t>(all + 1));
  out.push_back(make_sample(features, std::vector<std::uint8_t>(d, 1), kernel_width));
  for (std::uint64_t code = 0; code < all; ++code) {
    std::vector<std::uint8_t> mask(d);
    for (std::size_t j = 0; j < d; ++j) mask[j] = static_cast<std::uint8_t>((code >> j) & 1U);
    out.push_back(make_sample(features, std::move(mask), kernel_width));
  }
  return out;
}

SurrogateFit fit_surrogate(std::span<const PerturbationSample> samples,
                           std::span<const double> targets, double ridge_lambda) {
  if (samples.empty()) fail(ErrorKind::kInvalidArgument, "fit_surrogate needs samples");
  if (targets.size() != samples.size()) {
    fail(ErrorKind::kInvalidArgument, "one target per sample is required");
  }
  if (!(ridge_lambda >= 0.0)) fail(ErrorKind::kInvalidArgument, "ridge lambda must be >= 0");
  const std::size_t d = samples.front().mask.size();
  if (samples.size() < d + 1) {
    fail(ErrorKind::kInvalidArgument, std::to_string(samples.size()) + " samples for " +
                                          std::to_string(d) + " words; need at least d + 1");
  }
  const std::size_t p = d + 1;

  // Augmented normal equations [A | b], feature 0 is the intercept.
  std::vector<double> a(p * (p + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (p + 1) + c]; };
  std::vector<double> z(p);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& mask = samples[i].mask;
    if (mask.size() != d) fail(ErrorKind::kInvalidArgument, "masks differ in length");
    const double w = samples[i].proximity;
    z[0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) z[j + 1] = mask[j] ? 1.0 : 0.0;
    for (std::size_t r = 0; r < p; ++r) {
      if (z[r] == 0.0) continue;
      const double wr = w * z[r];
      for (std::size_t c = 0; c < p; ++c) at(r, c) += wr * z[c];
      at(r, p) += wr * targets[i];
    }
  }
  for (std::size_t j = 1; j < p; ++j) at(j, j) += ridge_lambda;

  double scale = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) scale = std::max(scale, std::abs(at(r, c)));
  }
  if (scale == 0.0) fail(ErrorKind::kSingularSystem, "all sample weights are zero");

  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    }
    if (std::abs(at(pivot, col)) <= kPivotTolerance * scale) {
      fail(ErrorKind::kSingularSystem,
           "normal equations are rank-deficient at column " + std::to_string(col) +
               "; use a positive ridge lambda");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c <= p; ++c) std::swap(at(col, c), at(pivot, c));
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      const double factor = at(r, col) / at(col, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c <= p; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  std::vector<double> beta(p);
  for (std::size_t r = p; r-- > 0;) {
    double acc = at(r, p);
    for (std::size_t c = r + 1; c < p; ++c) acc -= at(r, c) * beta[c];
    beta[r] = acc / at(r, r);
  }

  SurrogateFit fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.begin() + 1, beta.end());
  return fit;
}

std::vector<WordWeight> top_k_words(std::span<const std::string> words,
                                    std::span<const double> coefficients, std::size_t k) {
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(coefficients[x]) > std::abs(coefficients[y]);
  });
  order.resize(std::min(k, order.size()));
  std::vector<WordWeight> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back({words[i], coefficients[i], i});
  return out;
}

Explanation explain(std::string_view text, ClassifierBackend& backend, const Taxonomy& taxonomy,
                    const ExplainOptions& options) {
  auto tokens = normalize_text(text, options.normalization);
  if (tokens.empty()) fail(ErrorKind::kTooShort, "text has no words after normalization");
  const TextFeatures features = TextFeatures::from_tokens(std::move(tokens));
  const std::size_t d = features.words.size();

  const bool exhaustive = d <= std::min(options.exhaustive_limit, kMaxEnumeratedWords);
  std::vector<PerturbationSample> samples;
  if (exhaustive) {
    samples = enumerate_masks(features, options.kernel_width);
  } else {
    samples = perturb(features, std::max(options.n_samples, d + 1), options.seed,
                      options.kernel_width);
  }

  std::vector<TextItem> batch;
  batch.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    batch.push_back({"sample-" + std::to_string(i), samples[i].text});
  }
  ProbabilityMatrix probs;
  try {
    probs = backend.classify_batch(batch);
    validate_matrix(probs, taxonomy);
  } catch (const std::exception& e) {
    fail(ErrorKind::kBackendFailure, "model '" + backend.model_id() + "': " + e.what());
  }
  if (probs.rows() != samples.size()) {
    fail(ErrorKind::kBackendFailure, "backend returned " + std::to_string(probs.rows()) +
                                         " rows for " + std::to_string(samples.size()) + " texts");
  }

  Explanation ex;
  ex.class_names = taxonomy.names();
  const auto original = probs.row(0);
  ex.class_probabilities.assign(original.begin(), original.end());
  ex.target = options.target_class ? taxonomy.index_of(*options.target_class)
                                   : ClassIndex{argmax_index(original)};
  ex.target_class = taxonomy.name(ex.target);

  std::vector<double> targets(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) targets[i] = probs.at(i, ex.target.value);
  auto fit = fit_surrogate(samples, targets, options.ridge_lambda);

  ex.words = features.words;
  ex.coefficients = std::move(fit.coefficients);
  ex.intercept = fit.intercept;
  ex.top_k = top_k_words(ex.words, ex.coefficients, options.k);
  ex.samples = samples.size();
  ex.exhaustive = exhaustive;
  return ex;
}

std::string explanation_to_json(const Explanation& ex) {
  nlohmann::ordered_json doc;
  doc["target_class"] = ex.target_class;
  nlohmann::ordered_json probs = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < ex.class_names.size(); ++c) {
    probs[ex.class_names[c]] = ex.class_probabilities[c];
  }
  doc["class_probabilities"] = probs;
  doc["intercept"] = ex.intercept;
  nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ex.words.size(); ++i) {
    coefs.push_back({{"word", ex.words[i]}, {"coefficient", ex.coefficients[i]}});
  }
  doc["coefficients"] = coefs;
  nlohmann::ordered_json top = nlohmann::ordered_json::array();
  for (const auto& w : ex.top_k) top.push_back({{"word", w.word}, {"coefficient", w.coefficient}});
  doc["top_k"] = top;
  doc["samples"] = ex.samples;
  doc["exhaustive"] = ex.exhaustive;
  return doc.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

std::string render_bars(const Explanation& ex, std::size_t width) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "Prediction probabilities\n";
  for (std::size_t c = 0; c < ex.class_names.size(); ++c) {
    const auto len = static_cast<std::size_t>(std::lround(ex.class_probabilities[c] * static_cast<double>(width)));
    out << "  " << std::left << std::setw(6) << ex.class_names[c] << ' '
        << ex.class_probabilities[c] << ' ' << std::string(len, '#')
        << (c == ex.target.value ? "  <- target" : "") << '\n';
  }
  double max_abs = 0.0;
  for (const auto& w : ex.top_k) max_abs = std::max(max_abs, std::abs(w.coefficient));
  out << "Top " << ex.top_k.size() << " words for " << ex.target_class << '\n';
  out << std::setprecision(4);
  for (const auto& w : ex.top_k) {
    const auto len = max_abs == 0.0 ? 0
                                    : static_cast<std::size_t>(std::lround(
                                          std::abs(w.coefficient) / max_abs * static_cast<double>(width)));
    out << "  " << std::right << std::showpos << w.coefficient << std::noshowpos << ' '
        << std::string(len, w.coefficient >= 0 ? '+' : '-') << ' ' << w.word << '\n';
  }
  return out.str();
}

}  // namespace tweetact
