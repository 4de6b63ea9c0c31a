#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpod/subspace.hpp"
#include "kpod/types.hpp"

namespace kpod {

struct TrainConfig {
  KernelSpec kernel;
  TruncationPolicy policy;
  bool centered = false;
  bool balance = false;          // split oversized classes into subsets
  double balance_factor = 2.0;   // split when size >= factor * reference
  std::uint64_t seed = 0;        // reserved; splitting is deterministic

  void validate() const;
};

/// Ordered collection of per-class subspaces sharing one kernel. Immutable;
/// add_class/remove_class return a new value.
struct Classifier {
  TrainConfig config;
  std::vector<std::string> labels;       // sorted, distinct
  std::vector<SubspaceModel> subspaces;  // ascending label, then subset_index

  /// Total training samples currently held for a label.
  int class_size(const std::string& label) const;
  /// Smallest class size across labels.
  int reference_size() const;
  int label_index(const std::string& label) const;  // -1 when absent
};

struct Prediction {
  std::string label;
  std::vector<double> subspace_distances;  // aligned with classifier.subspaces
  std::vector<double> class_distances;     // aligned with classifier.labels
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<std::string> labels;          // evaluation label order
  std::vector<double> recall;               // per label; 0 when unrepresented
  std::vector<std::vector<int>> confusion;  // [true][predicted]
};

/// Deterministic round-robin split of an oversized class: q subsets where
/// q = round(|samples|/reference) (half-to-even), subset k taking samples
/// k, k+q, k+2q, ... No split below balance_factor * reference.
std::vector<std::vector<SparseVec>> split_class(const std::vector<SparseVec>& samples,
                                                int reference, double balance_factor = 2.0);

Classifier train(const std::vector<Sample>& dataset, const TrainConfig& config);

Prediction predict(const Classifier& c, const SparseVec& query);

/// Parallel over queries; results identical to the serial reference.
std::vector<Prediction> predict_batch(const Classifier& c, const std::vector<SparseVec>& queries);
std::vector<Prediction> predict_batch_serial(const Classifier& c,
                                             const std::vector<SparseVec>& queries);

/// Fits only the new class; existing subspaces are reused unmodified. The
/// splitting reference for the new class is min(existing reference, new
/// class size); existing classes are not re-split.
Classifier add_class(const Classifier& c, const std::string& label,
                     const std::vector<SparseVec>& samples);

Classifier remove_class(const Classifier& c, const std::string& label);

Metrics evaluate(const Classifier& c, const std::vector<Sample>& test);

}  // namespace kpod
