#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "spectral.hpp"

namespace fda {

struct Size2 {
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const Size2&, const Size2&) = default;
};

// Bilinear resampling with half-pixel centres and edge clamping.
RasterImage resize_bilinear(const RasterImage& image, Size2 size);

RasterImage crop(const RasterImage& image, std::size_t top, std::size_t left, Size2 size);

struct PreprocessPolicy {
  std::optional<Size2> resize;  // applied first
  std::optional<Size2> crop;    // random offsets from the job's crop stream
};

// Values stay on the [0, 255] scale; no mean subtraction happens here.
RasterImage preprocess(const RasterImage& image, const PreprocessPolicy& policy,
                       std::uint64_t seed = 0, std::uint64_t item_index = 0);

}  // namespace fda
