#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tweetact/taxonomy.hpp"

namespace tweetact {

inline constexpr double kRowSumTolerance = 1e-4;

// N x C class probabilities from one model, row-major.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix() = default;
  ProbabilityMatrix(std::string model_id, std::vector<std::string> class_names);

  void add_row(std::string id, std::span<const double> probabilities);

  const std::string& model_id() const { return model_id_; }
  void set_model_id(std::string id) { model_id_ = std::move(id); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t rows() const { return ids_.size(); }
  std::size_t cols() const { return class_names_.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
  double at(std::size_t i, std::size_t c) const { return values_[i * cols() + c]; }

 private:
  std::string model_id_;
  std::vector<std::string> ids_;
  std::vector<std::string> class_names_;
  std::vector<double> values_;
};

// Throws kRowNotNormalized (id and sum in the message), kClassOrderMismatch
// or kDuplicateId. Entries must lie in [0, 1]; rows must sum to 1 within
// kRowSumTolerance.
const ProbabilityMatrix& validate_matrix(const ProbabilityMatrix& matrix,
                                         const Taxonomy& taxonomy);

struct EnsembleConfig {
  // Empty means uniform weights of 1.0.
  std::vector<double> weights;
};

// Weighted sum of aligned matrices; not renormalized. Per cell, the M
// weighted terms are added in ascending order, so the result is bit-identical
// under any permutation of the (matrix, weight) pairs.
// Throws kIdMismatch, kClassOrderMismatch, kWeightCountMismatch,
// kInvalidArgument (no matrices, non-positive weight).
ProbabilityMatrix fuse(std::span<const ProbabilityMatrix> matrices,
                       const EnsembleConfig& config = {});

struct Prediction {
  std::string id;
  ClassIndex label;
  double score = 0.0;
};

// Lowest index wins ties. Throws kEmptyRow when the matrix has no columns.
std::vector<Prediction> argmax_labels(const ProbabilityMatrix& matrix,
                                      const Taxonomy& taxonomy);

// Same rule for a single row.
std::size_t argmax_index(std::span<const double> row);

}  // namespace tweetact
