#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fda {

inline constexpr std::int32_t kIgnoreLabel = 255;

// Per-pixel class probabilities, row-major with the class index fastest.
class PredictionMap {
 public:
  PredictionMap() = default;
  PredictionMap(std::size_t height, std::size_t width, std::size_t classes);
  PredictionMap(std::size_t height, std::size_t width, std::size_t classes,
                std::vector<double> probs);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  double& at(std::size_t pixel, std::size_t k) { return probs_[pixel * classes_ + k]; }
  double at(std::size_t pixel, std::size_t k) const { return probs_[pixel * classes_ + k]; }
  std::span<const double> pixel(std::size_t p) const {
    return std::span<const double>(probs_).subspan(p * classes_, classes_);
  }

  std::span<const double> probs() const noexcept { return probs_; }
  std::span<double> probs() noexcept { return probs_; }

  bool same_shape(const PredictionMap& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && classes_ == o.classes_;
  }

  // Finite, non-negative, and each pixel sums to 1 within `tolerance`.
  void validate(double tolerance = 1e-5) const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> probs_;
};

// Per-pixel class indices; kIgnoreLabel marks unlabeled or rejected pixels.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(std::size_t height, std::size_t width, std::int32_t fill = kIgnoreLabel);
  LabelMap(std::size_t height, std::size_t width, std::vector<std::int32_t> labels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  std::int32_t& operator[](std::size_t p) { return labels_[p]; }
  std::int32_t operator[](std::size_t p) const { return labels_[p]; }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }

  bool same_dims(std::size_t h, std::size_t w) const noexcept { return height_ == h && width_ == w; }

  // Every label is in [0, classes) or kIgnoreLabel.
  void validate(std::size_t classes) const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::int32_t> labels_;
};

}  // namespace fda
