#include "maps.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace fda {

PredictionMap::PredictionMap(std::size_t height, std::size_t width, std::size_t classes)
    : PredictionMap(height, width, classes, std::vector<double>(height * width * classes, 0.0)) {}

PredictionMap::PredictionMap(std::size_t height, std::size_t width, std::size_t classes,
                             std::vector<double> probs)
    : height_(height), width_(width), classes_(classes), probs_(std::move(probs)) {
  if (height == 0 || width == 0 || classes == 0)
    throw invalid_argument("prediction map dimensions must be positive");
  if (probs_.size() != height * width * classes)
    throw invalid_argument("probability count does not match prediction map dimensions");
}

void PredictionMap::validate(double tolerance) const {
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    double sum = 0.0;
    for (double v : pixel(p)) {
      if (!std::isfinite(v)) throw invalid_argument("prediction map contains a non-finite value");
      if (v < 0.0) throw invalid_argument("prediction map contains a negative probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw invalid_argument("probabilities at pixel " + std::to_string(p) + " sum to " +
                             std::to_string(sum) + ", not 1");
  }
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::int32_t fill)
    : LabelMap(height, width, std::vector<std::int32_t>(height * width, fill)) {}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::vector<std::int32_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height == 0 || width == 0) throw invalid_argument("label map dimensions must be positive");
  if (labels_.size() != height * width)
    throw invalid_argument("label count does not match label map dimensions");
}

void LabelMap::validate(std::size_t classes) const {
  if (classes == 0 || classes > static_cast<std::size_t>(kIgnoreLabel))
    throw invalid_argument("class count must be in [1, 255] so labels stay distinct from IGNORE");
  for (std::size_t p = 0; p < labels_.size(); ++p) {
    const std::int32_t v = labels_[p];
    if (v == kIgnoreLabel) continue;
    if (v < 0 || static_cast<std::size_t>(v) >= classes)
      throw invalid_argument("label " + std::to_string(v) + " at pixel " + std::to_string(p) +
                             " is outside [0, " + std::to_string(classes) + ")");
  }
}

}  // namespace fda
