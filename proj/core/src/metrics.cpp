#include "tweetact/metrics.hpp"

#include <cmath>
#include <unordered_map>

#include "tweetact/error.hpp"

namespace tweetact {
namespace {

double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(Taxonomy taxonomy)
    : taxonomy_(std::move(taxonomy)), counts_(taxonomy_.size() * taxonomy_.size(), 0) {}

ConfusionMatrix::ConfusionMatrix(Taxonomy taxonomy, std::vector<std::uint64_t> counts)
    : taxonomy_(std::move(taxonomy)), counts_(std::move(counts)) {
  if (counts_.size() != taxonomy_.size() * taxonomy_.size()) {
    fail(ErrorKind::kInvalidArgument, "confusion matrix needs " +
                                          std::to_string(taxonomy_.size() * taxonomy_.size()) +
                                          " cells, got " + std::to_string(counts_.size()));
  }
}

void ConfusionMatrix::add(ClassIndex gold, ClassIndex predicted, std::uint64_t n) {
  if (gold.value >= size() || predicted.value >= size()) {
    fail(ErrorKind::kUnknownLabel, "class index out of range");
  }
  counts_[gold.value * size() + predicted.value] += n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < size(); ++p) s += at(c, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < size(); ++g) s += at(g, c);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < size(); ++c) s += at(c, c);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto v : counts_) s += v;
  return s;
}

ConfusionMatrix confusion(std::span<const ClassIndex> gold, std::span<const ClassIndex> predicted,
                          const Taxonomy& taxonomy) {
  if (gold.size() != predicted.size()) {
    fail(ErrorKind::kLengthMismatch, std::to_string(gold.size()) + " gold labels vs " +
                                         std::to_string(predicted.size()) + " predictions");
  }
  if (gold.empty()) fail(ErrorKind::kLengthMismatch, "no label pairs to evaluate");
  ConfusionMatrix cm(taxonomy);
  for (std::size_t i = 0; i < gold.size(); ++i) cm.add(gold[i], predicted[i]);
  return cm;
}

ConfusionMatrix confusion(std::span<const GoldLabel> gold, std::span<const Prediction> predicted,
                          const Taxonomy& taxonomy) {
  if (gold.size() != predicted.size()) {
    fail(ErrorKind::kLengthMismatch, std::to_string(gold.size()) + " gold labels vs " +
                                         std::to_string(predicted.size()) + " predictions");
  }
  if (gold.empty()) fail(ErrorKind::kLengthMismatch, "no label pairs to evaluate");
  std::unordered_map<std::string_view, const Prediction*> by_id;
  by_id.reserve(predicted.size());
  for (const auto& p : predicted) {
    if (!by_id.emplace(p.id, &p).second) {
      fail(ErrorKind::kIdMismatch, "prediction id '" + p.id + "' appears twice");
    }
  }
  ConfusionMatrix cm(taxonomy);
  for (const auto& g : gold) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) fail(ErrorKind::kIdMismatch, "no prediction for gold id '" + g.id + "'");
    cm.add(g.label, it->second->label);
  }
  return cm;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out(cm.size());
  for (std::size_t c = 0; c < cm.size(); ++c) {
    auto& m = out[c];
    m.precision = ratio_or_zero(cm.tp(c), cm.tp(c) + cm.fp(c));
    m.recall = ratio_or_zero(cm.tp(c), cm.tp(c) + cm.fn(c));
    const double denom = m.precision + m.recall;
    m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
    m.support = cm.row_sum(c);
  }
  return out;
}

AggregateMetrics aggregate(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) fail(ErrorKind::kEmptyMatrix, "confusion matrix is empty");
  const auto per_class = per_class_metrics(cm);
  AggregateMetrics agg;
  agg.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  double macro = 0.0;
  double weighted = 0.0;
  for (const auto& m : per_class) {
    macro += m.f1;
    weighted += static_cast<double>(m.support) * m.f1;
  }
  agg.macro_f1 = per_class.empty() ? 0.0 : macro / static_cast<double>(per_class.size());
  agg.weighted_f1 = weighted / static_cast<double>(total);
  return agg;
}

MetricsReport evaluate(const ConfusionMatrix& cm) {
  MetricsReport report;
  report.classes = cm.taxonomy().names();
  report.per_class = per_class_metrics(cm);
  report.overall = aggregate(cm);
  report.total = cm.total();
  report.confusion = cm;
  return report;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

}  // namespace tweetact
