#include "tweetact/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "tweetact/error.hpp"

namespace tweetact {

ProbabilityMatrix::ProbabilityMatrix(std::string model_id, std::vector<std::string> class_names)
    : model_id_(std::move(model_id)), class_names_(std::move(class_names)) {}

void ProbabilityMatrix::add_row(std::string id, std::span<const double> probabilities) {
  if (probabilities.size() != cols()) {
    fail(ErrorKind::kInvalidArgument, "row '" + id + "' has " +
                                          std::to_string(probabilities.size()) +
                                          " values, expected " + std::to_string(cols()));
  }
  ids_.push_back(std::move(id));
  values_.insert(values_.end(), probabilities.begin(), probabilities.end());
}

const ProbabilityMatrix& validate_matrix(const ProbabilityMatrix& matrix,
                                         const Taxonomy& taxonomy) {
  if (matrix.class_names() != taxonomy.names()) {
    std::ostringstream msg;
    msg << "model '" << matrix.model_id() << "' class order [";
    for (std::size_t i = 0; i < matrix.cols(); ++i) msg << (i ? "," : "") << matrix.class_names()[i];
    msg << "] does not match taxonomy [";
    for (std::size_t i = 0; i < taxonomy.size(); ++i) msg << (i ? "," : "") << taxonomy.names()[i];
    msg << "]";
    fail(ErrorKind::kClassOrderMismatch, msg.str());
  }
  std::unordered_set<std::string_view> ids;
  ids.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto& id = matrix.ids()[i];
    if (!ids.insert(id).second) {
      fail(ErrorKind::kDuplicateId, "model '" + matrix.model_id() + "' repeats id '" + id + "'");
    }
    double sum = 0.0;
    for (double p : matrix.row(i)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "row '" << id << "' has entry " << p << " outside [0,1]";
        fail(ErrorKind::kRowNotNormalized, msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row '" << id << "' sums to " << sum;
      fail(ErrorKind::kRowNotNormalized, msg.str());
    }
  }
  return matrix;
}

ProbabilityMatrix fuse(std::span<const ProbabilityMatrix> matrices, const EnsembleConfig& config) {
  if (matrices.empty()) fail(ErrorKind::kInvalidArgument, "fuse needs at least one matrix");
  std::vector<double> weights = config.weights;
  if (weights.empty()) weights.assign(matrices.size(), 1.0);
  if (weights.size() != matrices.size()) {
    fail(ErrorKind::kWeightCountMismatch, std::to_string(weights.size()) + " weights for " +
                                              std::to_string(matrices.size()) + " models");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::kInvalidArgument, "ensemble weights must be positive and finite");
    }
  }

  const auto& first = matrices.front();
  for (const auto& m : matrices.subspan(1)) {
    if (m.class_names() != first.class_names()) {
      fail(ErrorKind::kClassOrderMismatch, "model '" + m.model_id() +
                                               "' class order differs from '" +
                                               first.model_id() + "'");
    }
    if (m.ids() != first.ids()) {
      std::string detail = "row count " + std::to_string(m.rows()) + " vs " +
                           std::to_string(first.rows());
      for (std::size_t i = 0; i < std::min(m.rows(), first.rows()); ++i) {
        if (m.ids()[i] != first.ids()[i]) {
          detail = "row " + std::to_string(i) + " is '" + m.ids()[i] + "', expected '" +
                   first.ids()[i] + "'";
          break;
        }
      }
      fail(ErrorKind::kIdMismatch, "model '" + m.model_id() + "' ids differ: " + detail);
    }
  }

  ProbabilityMatrix fused("ensemble", first.class_names());
  std::vector<double> terms(matrices.size());
  std::vector<double> row(first.cols());
  for (std::size_t i = 0; i < first.rows(); ++i) {
    for (std::size_t c = 0; c < first.cols(); ++c) {
      for (std::size_t m = 0; m < matrices.size(); ++m) terms[m] = weights[m] * matrices[m].at(i, c);
      std::sort(terms.begin(), terms.end());
      double sum = 0.0;
      for (double t : terms) sum += t;
      row[c] = sum;
    }
    fused.add_row(first.ids()[i], row);
  }
  return fused;
}

std::size_t argmax_index(std::span<const double> row) {
  if (row.empty()) fail(ErrorKind::kEmptyRow, "argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

std::vector<Prediction> argmax_labels(const ProbabilityMatrix& matrix, const Taxonomy& taxonomy) {
  if (matrix.cols() == 0) fail(ErrorKind::kEmptyRow, "matrix has no class columns");
  if (matrix.cols() != taxonomy.size()) {
    fail(ErrorKind::kClassOrderMismatch, "matrix has " + std::to_string(matrix.cols()) +
                                             " columns, taxonomy has " +
                                             std::to_string(taxonomy.size()) + " classes");
  }
  std::vector<Prediction> out;
  out.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto row = matrix.row(i);
    const std::size_t best = argmax_index(row);
    out.push_back({matrix.ids()[i], ClassIndex{best}, row[best]});
  }
  return out;
}

}  // namespace tweetact
