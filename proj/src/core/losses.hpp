#pragma once

#include <vector>

#include "maps.hpp"

namespace fda {

enum class Reduction { kMean, kSum };

struct LossConfig {
  double eta = 2.0;          // Charbonnier exponent
  double lambda_ent = 0.005;  // entropy weight
  double epsilon = 0.001;     // Charbonnier floor
  Reduction reduction = Reduction::kMean;

  void validate() const;
};

inline constexpr double kProbabilityFloor = 1e-12;

// Mean (or sum) of -log p[label] over non-ignored pixels. Throws
// ErrorCode::kEmptyReduction when every pixel is ignored.
double cross_entropy(const PredictionMap& pred, const LabelMap& labels,
                     Reduction reduction = Reduction::kMean);

// Shannon entropy per pixel, natural log, 0 log 0 := 0.
std::vector<double> pixel_entropy(const PredictionMap& pred);

// (x^2 + epsilon^2)^eta
double charbonnier(double x, double eta, double epsilon = 0.001);
double charbonnier_derivative(double x, double eta, double epsilon = 0.001);

double robust_entropy(const PredictionMap& pred, const LossConfig& cfg = {});

// Same kernel over raw non-negative entries without the per-pixel sum-to-one
// check; used for finite-difference probing of the free-input gradient.
double robust_entropy_raw(std::span<const double> probs, std::size_t classes,
                          const LossConfig& cfg = {});

// d robust_entropy / d p(pixel, k), treating every probability as a free
// input (no renormalization). Same layout as pred.probs().
std::vector<double> robust_entropy_gradient(const PredictionMap& pred, const LossConfig& cfg = {});

double combined_loss(double source_ce, double target_entropy, const LossConfig& cfg = {});
double sst_loss(double source_ce, double target_entropy, double pseudo_ce,
                const LossConfig& cfg = {});

}  // namespace fda
