#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maps.hpp"
#include "spectral.hpp"

namespace fda {

// On-disk tensor: `<base>.json` header plus `<base>.bin` payload holding
// little-endian float32 or int32 values, row-major, channel last.
//
//   {"format": "fda-tensor", "version": 1, "dims": [H, W, K],
//    "dtype": "float32", "endianness": "little",
//    "layout": "row-major-channel-last"}
enum class DType { kFloat32, kInt32 };

struct TensorHeader {
  std::vector<std::size_t> dims;
  DType dtype = DType::kFloat32;

  std::size_t element_count() const;
  std::size_t payload_bytes() const { return element_count() * 4; }
};

struct TensorPaths {
  std::filesystem::path header;
  std::filesystem::path payload;
};

// Accepts the base name, the .json header, or the .bin payload.
TensorPaths tensor_paths(const std::filesystem::path& any);

std::string header_to_json(const TensorHeader& header);
TensorHeader header_from_json(const std::string& text);

void write_tensor_f32(const std::filesystem::path& path, const TensorHeader& header,
                      const std::vector<float>& values);
void write_tensor_i32(const std::filesystem::path& path, const TensorHeader& header,
                      const std::vector<std::int32_t>& values);

struct RawTensor {
  TensorHeader header;
  std::vector<float> f32;
  std::vector<std::int32_t> i32;
};

// Validates the header and that the payload length matches it exactly.
RawTensor read_tensor(const std::filesystem::path& path);

void write_prediction(const std::filesystem::path& path, const PredictionMap& pred);
// Rejects NaN/inf; does not enforce the sum-to-one invariant.
PredictionMap read_prediction(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const LabelMap& labels);
// Tensor (.json/.bin) or 8-bit gray PNG label image.
LabelMap read_labels(const std::filesystem::path& path);

void write_image_tensor(const std::filesystem::path& path, const RasterImage& image);

}  // namespace fda
