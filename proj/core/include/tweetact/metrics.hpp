#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetact/ensemble.hpp"
#include "tweetact/taxonomy.hpp"

namespace tweetact {

// C x C counts, rows = gold class, columns = predicted class.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(Taxonomy taxonomy);
  // `counts` is row-major C x C.
  ConfusionMatrix(Taxonomy taxonomy, std::vector<std::uint64_t> counts);

  const Taxonomy& taxonomy() const { return taxonomy_; }
  std::size_t size() const { return taxonomy_.size(); }

  std::uint64_t at(std::size_t gold, std::size_t predicted) const {
    return counts_[gold * size() + predicted];
  }
  void add(ClassIndex gold, ClassIndex predicted, std::uint64_t n = 1);

  std::uint64_t row_sum(std::size_t c) const;
  std::uint64_t col_sum(std::size_t c) const;
  std::uint64_t tp(std::size_t c) const { return at(c, c); }
  std::uint64_t fp(std::size_t c) const { return col_sum(c) - tp(c); }
  std::uint64_t fn(std::size_t c) const { return row_sum(c) - tp(c); }
  std::uint64_t trace() const;
  std::uint64_t total() const;

  const std::vector<std::uint64_t>& counts() const { return counts_; }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.taxonomy_ == b.taxonomy_ && a.counts_ == b.counts_;
  }

 private:
  Taxonomy taxonomy_;
  std::vector<std::uint64_t> counts_;
};

// Throws kLengthMismatch when the sequences differ in length or are empty.
ConfusionMatrix confusion(std::span<const ClassIndex> gold,
                          std::span<const ClassIndex> predicted,
                          const Taxonomy& taxonomy);

struct GoldLabel {
  std::string id;
  ClassIndex label;
};

// Id-aligned variant: every gold id must have exactly one prediction.
// Predictions may come in any order. Throws kLengthMismatch, kIdMismatch.
ConfusionMatrix confusion(std::span<const GoldLabel> gold,
                          std::span<const Prediction> predicted,
                          const Taxonomy& taxonomy);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

// 0/0 is taken as 0 for precision, recall and F1.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

struct AggregateMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
};

// Throws kEmptyMatrix when the matrix holds no pairs.
AggregateMetrics aggregate(const ConfusionMatrix& cm);

struct MetricsReport {
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  AggregateMetrics overall;
  std::uint64_t total = 0;
  ConfusionMatrix confusion;
};

MetricsReport evaluate(const ConfusionMatrix& cm);

// Round half away from zero to two decimals, as the report tables print.
double round2(double value);

}  // namespace tweetact
