#include "tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "error.hpp"
#include "image_io.hpp"

namespace fda {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t TensorHeader::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

TensorPaths tensor_paths(const fs::path& any) {
  fs::path base = any;
  if (base.extension() == ".json" || base.extension() == ".bin") base.replace_extension();
  fs::path header = base;
  fs::path payload = base;
  header += ".json";
  payload += ".bin";
  return {header, payload};
}

std::string header_to_json(const TensorHeader& header) {
  json j;
  j["format"] = "fda-tensor";
  j["version"] = 1;
  j["dims"] = header.dims;
  j["dtype"] = header.dtype == DType::kFloat32 ? "float32" : "int32";
  j["endianness"] = "little";
  j["layout"] = "row-major-channel-last";
  return j.dump(2);
}

TensorHeader header_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("tensor header is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "fda-tensor")
    throw invalid_argument("tensor header: format is not 'fda-tensor'");
  if (j.value("version", 0) != 1) throw invalid_argument("tensor header: unsupported version");
  if (j.value("endianness", "") != "little")
    throw invalid_argument("tensor header: endianness must be 'little'");
  if (j.value("layout", "") != "row-major-channel-last")
    throw invalid_argument("tensor header: layout must be 'row-major-channel-last'");
  TensorHeader h;
  const std::string dtype = j.value("dtype", "");
  if (dtype == "float32")
    h.dtype = DType::kFloat32;
  else if (dtype == "int32")
    h.dtype = DType::kInt32;
  else
    throw invalid_argument("tensor header: dtype must be float32 or int32");
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].empty())
    throw invalid_argument("tensor header: dims must be a non-empty array");
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer() || d.get<long long>() <= 0)
      throw invalid_argument("tensor header: dims must be positive integers");
    h.dims.push_back(d.get<std::size_t>());
  }
  return h;
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
std::vector<char> to_little_endian(const std::vector<T>& values) {
  static_assert(sizeof(T) == 4);
  std::vector<char> bytes(values.size() * 4);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < bytes.size(); i += 4) {
      std::swap(bytes[i], bytes[i + 3]);
      std::swap(bytes[i + 1], bytes[i + 2]);
    }
  return bytes;
}

template <typename T>
std::vector<T> from_little_endian(std::vector<char> bytes) {
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < bytes.size(); i += 4) {
      std::swap(bytes[i], bytes[i + 3]);
      std::swap(bytes[i + 1], bytes[i + 2]);
    }
  std::vector<T> values(bytes.size() / 4);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

void write_file(const fs::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw io_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
void write_tensor(const fs::path& path, const TensorHeader& header, const std::vector<T>& values) {
  if (values.size() != header.element_count())
    throw invalid_argument("tensor value count does not match header dims");
  const auto paths = tensor_paths(path);
  const std::string text = header_to_json(header) + "\n";
  write_file(paths.header, text.data(), text.size());
  const auto bytes = to_little_endian(values);
  write_file(paths.payload, bytes.data(), bytes.size());
}

}  // namespace

void write_tensor_f32(const fs::path& path, const TensorHeader& header,
                      const std::vector<float>& values) {
  if (header.dtype != DType::kFloat32) throw invalid_argument("header dtype is not float32");
  write_tensor(path, header, values);
}

void write_tensor_i32(const fs::path& path, const TensorHeader& header,
                      const std::vector<std::int32_t>& values) {
  if (header.dtype != DType::kInt32) throw invalid_argument("header dtype is not int32");
  write_tensor(path, header, values);
}

RawTensor read_tensor(const fs::path& path) {
  const auto paths = tensor_paths(path);
  RawTensor t;
  t.header = header_from_json(read_text(paths.header));
  std::ifstream in(paths.payload, std::ios::binary | std::ios::ate);
  if (!in) throw io_error("cannot read " + paths.payload.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != t.header.payload_bytes())
    throw invalid_argument("payload length mismatch for " + paths.payload.string() + ": " +
                           std::to_string(size) + " bytes, header implies " +
                           std::to_string(t.header.payload_bytes()));
  in.seekg(0);
  std::vector<char> bytes(size);
  in.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!in) throw io_error("read failed for " + paths.payload.string());
  if (t.header.dtype == DType::kFloat32)
    t.f32 = from_little_endian<float>(std::move(bytes));
  else
    t.i32 = from_little_endian<std::int32_t>(std::move(bytes));
  return t;
}

void write_prediction(const fs::path& path, const PredictionMap& pred) {
  TensorHeader h{{pred.height(), pred.width(), pred.classes()}, DType::kFloat32};
  std::vector<float> values(pred.probs().begin(), pred.probs().end());
  write_tensor_f32(path, h, values);
}

PredictionMap read_prediction(const fs::path& path) {
  RawTensor t = read_tensor(path);
  if (t.header.dtype != DType::kFloat32 || t.header.dims.size() != 3)
    throw invalid_argument("prediction tensor must be float32 with dims [H, W, K]: " +
                           path.string());
  std::vector<double> probs(t.f32.begin(), t.f32.end());
  for (double v : probs)
    if (!std::isfinite(v)) throw invalid_argument("prediction tensor contains NaN or inf: " +
                                                  path.string());
  return PredictionMap(t.header.dims[0], t.header.dims[1], t.header.dims[2], std::move(probs));
}

void write_labels(const fs::path& path, const LabelMap& labels) {
  TensorHeader h{{labels.height(), labels.width()}, DType::kInt32};
  std::vector<std::int32_t> values(labels.labels().begin(), labels.labels().end());
  write_tensor_i32(path, h, values);
}

LabelMap read_labels(const fs::path& path) {
  if (path.extension() == ".png") {
    const RasterImage img = load_image(path);
    if (img.channels() != 1) throw invalid_argument("label PNG must be single-channel: " +
                                                    path.string());
    std::vector<std::int32_t> labels(img.samples().begin(), img.samples().end());
    return LabelMap(img.height(), img.width(), std::move(labels));
  }
  RawTensor t = read_tensor(path);
  const auto& d = t.header.dims;
  if (t.header.dtype != DType::kInt32 || !(d.size() == 2 || (d.size() == 3 && d[2] == 1)))
    throw invalid_argument("label tensor must be int32 with dims [H, W]: " + path.string());
  return LabelMap(d[0], d[1], std::move(t.i32));
}

void write_image_tensor(const fs::path& path, const RasterImage& image) {
  TensorHeader h{{image.height(), image.width(), image.channels()}, DType::kFloat32};
  std::vector<float> values(image.samples().begin(), image.samples().end());
  write_tensor_f32(path, h, values);
}

}  // namespace fda
