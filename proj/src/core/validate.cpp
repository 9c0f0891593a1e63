#include "validate.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "error.hpp"
#include "image_io.hpp"
#include "job.hpp"
#include "manifest.hpp"
#include "tensor_io.hpp"

namespace fda {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dims_text(const std::vector<std::size_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? ", " : "") + std::to_string(dims[i]);
  return s + "]";
}

std::string detect_kind(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") return "image";
  if (ext == ".bin") return "tensor";
  const std::string text = read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw invalid_argument(path.string() + " is not JSON and has no recognised extension");
  }
  if (j.is_object() && j.value("format", "") == "fda-tensor") return "tensor";
  if (j.is_object() && j.value("format", "") == "fda-manifest") return "manifest";
  if (j.is_object() && j.contains("items") && j.contains("config")) return "report";
  return "job";
}

}  // namespace

std::string validate_file(const fs::path& path, const std::string& kind_in) {
  const std::string kind = (kind_in.empty() || kind_in == "auto") ? detect_kind(path) : kind_in;
  if (kind == "tensor") {
    const RawTensor t = read_tensor(path);
    for (float v : t.f32)
      if (!std::isfinite(v)) throw invalid_argument("tensor payload contains NaN or inf");
    return "tensor ok: dims " + dims_text(t.header.dims) + ", " +
           (t.header.dtype == DType::kFloat32 ? "float32" : "int32");
  }
  if (kind == "prediction") {
    const PredictionMap p = read_prediction(path);
    p.validate();
    return "prediction ok: " + std::to_string(p.height()) + "x" + std::to_string(p.width()) +
           ", " + std::to_string(p.classes()) + " classes";
  }
  if (kind == "labels") {
    const LabelMap l = read_labels(path);
    l.validate(static_cast<std::size_t>(kIgnoreLabel));
    return "labels ok: " + std::to_string(l.height()) + "x" + std::to_string(l.width());
  }
  if (kind == "manifest") {
    const DatasetManifest m = load_manifest(path);
    return "manifest ok: " + std::to_string(m.size()) + " entries";
  }
  if (kind == "report") {
    const auto j = nlohmann::json::parse(read_text(path));
    job_from_json(j.at("config").dump()).validate();
    std::size_t ok = 0, failed = 0;
    for (const auto& item : j.at("items")) (item.at("ok").get<bool>() ? ok : failed)++;
    if (ok != j.at("outputs").get<std::size_t>() || failed != j.at("failures").get<std::size_t>())
      throw invalid_argument("report item counts disagree with outputs/failures");
    return "report ok: " + std::to_string(ok) + " outputs, " + std::to_string(failed) + " failures";
  }
  if (kind == "job") {
    const AdaptJob job = job_from_json(read_text(path));
    job.validate();
    return "job ok: " + std::to_string(job.betas.size()) + " betas";
  }
  if (kind == "image") {
    const RasterImage img = load_image(path);
    img.validate_intensity_range();
    return "image ok: " + std::to_string(img.height()) + "x" + std::to_string(img.width()) + "x" +
           std::to_string(img.channels());
  }
  throw invalid_argument("unknown kind '" + kind + "'");
}

}  // namespace fda
