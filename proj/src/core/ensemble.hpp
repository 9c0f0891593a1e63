#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "maps.hpp"

namespace fda {

enum class ThresholdScope { kPerClassOverBatch, kPerImage };

struct EnsembleConfig {
  double top_fraction = 0.66;
  double confidence_floor = 0.9;
  ThresholdScope scope = ThresholdScope::kPerClassOverBatch;

  void validate() const;
};

// Element-wise mean of several softmax maps of identical shape.
PredictionMap mean_prediction(std::span<const PredictionMap> preds);

// Per-pixel argmax, ties to the lowest class index. Accepts unnormalized
// non-negative scores.
LabelMap argmax_labels(const PredictionMap& pred);

// First pass of pseudo-labelling: per-class confidence populations. Pools
// built from disjoint shards can be merged in any order.
class ConfidencePool {
 public:
  explicit ConfidencePool(std::size_t classes);

  void add(const PredictionMap& pred);
  void merge(const ConfidencePool& other);

  std::size_t classes() const noexcept { return per_class_.size(); }
  std::size_t count(std::size_t k) const { return per_class_[k].size(); }

  // Confidence at or above which the top `top_fraction` of class k is kept;
  // nullopt when class k was never predicted. Nearest rank counted from the
  // top: the ceil(top_fraction * n)-th largest confidence.
  std::optional<double> rank_threshold(std::size_t k, double top_fraction) const;

 private:
  std::vector<std::vector<double>> per_class_;
};

struct PseudoLabelResult {
  std::vector<LabelMap> labels;            // one per input map, IGNORE where rejected
  std::vector<double> kept_fraction;       // per class: kept / predicted, 0 when absent
  std::vector<double> mean_confidence;     // per class over kept pixels, 0 when none
  std::vector<std::size_t> candidate_count;
  std::vector<std::size_t> kept_count;
};

// A pixel keeps its argmax label iff its confidence reaches the floor OR the
// per-class rank threshold of its scope.
PseudoLabelResult pseudo_labels(std::span<const PredictionMap> mean_preds,
                                const EnsembleConfig& cfg = {});

struct MiouResult {
  std::size_t classes = 0;
  std::vector<std::optional<double>> iou;  // nullopt: class absent from GT and predictions
  double mean_iou = 0.0;
  std::vector<std::uint64_t> confusion;    // row = GT class, column = predicted class
  std::vector<std::uint64_t> unpredicted;  // per GT class: pixels predicted as IGNORE
  std::uint64_t valid_pixels = 0;
};

// Accumulates a confusion matrix over all pairs, skipping GT IGNORE pixels.
// A prediction of IGNORE on a valid GT pixel counts as a miss for that class.
MiouResult compute_miou(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                        std::size_t classes);

}  // namespace fda
