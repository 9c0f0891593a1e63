#include "preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace fda {

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;  // weight of hi
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> t(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double x = (static_cast<double>(i) + 0.5) * scale - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(x));
    const std::size_t hi = std::min(lo + 1, in - 1);
    t[i] = {lo, hi, x - static_cast<double>(lo)};
  }
  return t;
}

}  // namespace

RasterImage resize_bilinear(const RasterImage& image, Size2 size) {
  if (size.height == 0 || size.width == 0) throw invalid_argument("resize target has zero area");
  if (size.height == image.height() && size.width == image.width()) return image;
  const std::size_t C = image.channels();
  const auto ty = taps(image.height(), size.height);
  const auto tx = taps(image.width(), size.width);
  RasterImage out(size.height, size.width, C);
  for (std::size_t y = 0; y < size.height; ++y) {
    const Tap& a = ty[y];
    for (std::size_t x = 0; x < size.width; ++x) {
      const Tap& b = tx[x];
      for (std::size_t c = 0; c < C; ++c) {
        const double top =
            image.at(a.lo, b.lo, c) * (1.0 - b.frac) + image.at(a.lo, b.hi, c) * b.frac;
        const double bottom =
            image.at(a.hi, b.lo, c) * (1.0 - b.frac) + image.at(a.hi, b.hi, c) * b.frac;
        out.at(y, x, c) = top * (1.0 - a.frac) + bottom * a.frac;
      }
    }
  }
  return out;
}

RasterImage crop(const RasterImage& image, std::size_t top, std::size_t left, Size2 size) {
  if (size.height == 0 || size.width == 0) throw invalid_argument("crop has zero area");
  if (top + size.height > image.height() || left + size.width > image.width())
    throw invalid_argument("crop window exceeds the image");
  RasterImage out(size.height, size.width, image.channels());
  for (std::size_t h = 0; h < size.height; ++h)
    for (std::size_t w = 0; w < size.width; ++w)
      for (std::size_t c = 0; c < image.channels(); ++c)
        out.at(h, w, c) = image.at(top + h, left + w, c);
  return out;
}

RasterImage preprocess(const RasterImage& image, const PreprocessPolicy& policy,
                       std::uint64_t seed, std::uint64_t item_index) {
  RasterImage out = policy.resize ? resize_bilinear(image, *policy.resize) : image;
  if (policy.crop) {
    const Size2 c = *policy.crop;
    if (c.height == 0 || c.width == 0) throw invalid_argument("crop has zero area");
    if (c.height > out.height() || c.width > out.width())
      throw invalid_argument("crop is larger than the (resized) image");
    auto rng = SplitMix64::substream(seed, RngStream::kCrop, item_index);
    const std::size_t top = rng.uniform(out.height() - c.height + 1);
    const std::size_t left = rng.uniform(out.width() - c.width + 1);
    out = crop(out, top, left, c);
  }
  return out;
}

}  // namespace fda
