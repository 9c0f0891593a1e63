#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <random>

#include "error.hpp"
#include "image_io.hpp"
#include "manifest.hpp"
#include "preprocess.hpp"
#include "support/support.hpp"
#include "tensor_io.hpp"

using namespace fda;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

void touch(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << "x";
}

}  // namespace

TEST_CASE("quantization rounds half up and clamps") {
  const RasterImage img(1, 5, 1, {-3.0, 0.49, 0.5, 254.5, 300.0});
  CHECK(quantize(img) == std::vector<std::uint8_t>{0, 0, 1, 255, 255});
}

TEST_CASE("PNG round trip for RGB and gray") {
  TempDir dir("png");
  std::mt19937_64 rng(41);
  for (std::size_t C : {1, 3}) {
    std::vector<double> v(12 * 7 * C);
    for (double& x : v) x = static_cast<double>(rng() % 256);
    const RasterImage img(12, 7, C, v);
    const auto path = dir / ("img" + std::to_string(C) + ".png");
    save_png(path, img);
    const RasterImage back = load_image(path);
    CHECK(back.channels() == C);
    CHECK(quantize(back) == quantize(img));
  }
  CHECK_THROWS_AS(load_image(dir / "missing.png"), Error);
  std::ofstream(dir / "junk.png") << "not an image";
  CHECK_THROWS_AS(load_image(dir / "junk.png"), Error);
}

TEST_CASE("horizontal concatenation") {
  const RasterImage a(2, 1, 1, {1.0, 2.0});
  const RasterImage b(2, 2, 1, {3.0, 4.0, 5.0, 6.0});
  const std::vector<RasterImage> panels{a, b};
  const auto s = hconcat(panels);
  CHECK(s.width() == 3);
  CHECK(std::vector<double>(s.samples().begin(), s.samples().end()) ==
        std::vector<double>{1, 3, 4, 2, 5, 6});
  const std::vector<RasterImage> bad{a, RasterImage(3, 1, 1)};
  CHECK_THROWS_AS(hconcat(bad), Error);
}

TEST_CASE("bilinear resize") {
  SUBCASE("2x2 checkerboard upscaled twice matches the hand grid") {
    const RasterImage board(2, 2, 1, {0.0, 255.0, 255.0, 0.0});
    const auto up = resize_bilinear(board, {4, 4});
    const std::vector<double> want{0,      63.75,   191.25,  255,     //
                                   63.75,  95.625,  159.375, 191.25,  //
                                   191.25, 159.375, 95.625,  63.75,   //
                                   255,    191.25,  63.75,   0};
    for (std::size_t i = 0; i < 16; ++i) CHECK(up.samples()[i] == doctest::Approx(want[i]));
  }
  SUBCASE("own size is bit-identical") {
    std::mt19937_64 rng(42);
    const RasterImage img(9, 13, 3, testing_support::random_samples(rng, 9 * 13 * 3));
    const auto same = resize_bilinear(img, {9, 13});
    CHECK(std::memcmp(same.samples().data(), img.samples().data(), img.samples().size_bytes()) == 0);
  }
  SUBCASE("output dims follow the policy") {
    const RasterImage img(105, 191, 3);
    const auto out = preprocess(img, {.resize = Size2{72, 128}, .crop = std::nullopt});
    CHECK(out.height() == 72);
    CHECK(out.width() == 128);
    CHECK_THROWS_AS(resize_bilinear(img, {0, 10}), Error);
  }
}

TEST_CASE("random crop is seeded per item") {
  std::mt19937_64 rng(43);
  const RasterImage img(40, 50, 1, testing_support::random_samples(rng, 2000));
  const PreprocessPolicy policy{.resize = std::nullopt, .crop = Size2{10, 10}};
  const auto a = preprocess(img, policy, 7, 0);
  const auto b = preprocess(img, policy, 7, 0);
  CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
  bool differs = false;
  for (std::uint64_t item = 1; item < 6 && !differs; ++item) {
    const auto c = preprocess(img, policy, 7, item);
    differs = !std::equal(a.samples().begin(), a.samples().end(), c.samples().begin());
  }
  CHECK(differs);
  CHECK_THROWS_AS(preprocess(img, {.resize = std::nullopt, .crop = Size2{41, 10}}), Error);
}

TEST_CASE("tensor files") {
  TempDir dir("tensor");
  SUBCASE("prediction round trip is exact for float32 values") {
    std::mt19937_64 rng(44);
    auto probs = testing_support::random_probs(rng, 6 * 5, 4);
    for (double& v : probs) v = static_cast<float>(v);
    const PredictionMap pred(6, 5, 4, probs);
    write_prediction(dir / "p", pred);
    CHECK(fs::exists(dir / "p.json"));
    CHECK(fs::file_size(dir / "p.bin") == 6 * 5 * 4 * 4);
    const auto back = read_prediction(dir / "p.json");
    CHECK(back.same_shape(pred));
    CHECK(std::vector<double>(back.probs().begin(), back.probs().end()) == probs);
  }
  SUBCASE("labels round trip through tensor and PNG") {
    LabelMap labels(3, 4, std::vector<std::int32_t>{0, 1, 2, 255, 4, 5, 6, 7, 8, 9, 10, 18});
    write_labels(dir / "l", labels);
    CHECK(read_labels(dir / "l.bin") == labels);
    save_png_u8(dir / "l.png", 3, 4, 1,
                std::vector<std::uint8_t>(labels.labels().begin(), labels.labels().end()));
    CHECK(read_labels(dir / "l.png") == labels);
  }
  SUBCASE("payload size arithmetic at full scale") {
    const TensorHeader h{{512, 1024, 19}, DType::kFloat32};
    CHECK(h.payload_bytes() == std::size_t{512} * 1024 * 19 * 4);
  }
  SUBCASE("header round trip and schema") {
    const TensorHeader h{{2, 3, 4}, DType::kInt32};
    const auto text = header_to_json(h);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["format"] == "fda-tensor");
    CHECK(j["endianness"] == "little");
    CHECK(j["layout"] == "row-major-channel-last");
    CHECK(j["dtype"] == "int32");
    const auto back = header_from_json(text);
    CHECK(back.dims == h.dims);
    CHECK(back.dtype == DType::kInt32);
    CHECK_THROWS_AS(header_from_json("{\"format\":\"fda-tensor\"}"), Error);
  }
  SUBCASE("truncated payload is a length mismatch") {
    write_prediction(dir / "t", PredictionMap(2, 2, 2, std::vector<double>(8, 0.5)));
    fs::resize_file(dir / "t.bin", 30);
    CHECK_THROWS_AS(read_tensor(dir / "t.json"), Error);
  }
  SUBCASE("NaN probabilities are rejected") {
    write_tensor_f32(dir / "n", {{1, 1, 2}, DType::kFloat32}, {0.5f, std::nanf("")});
    CHECK_THROWS_AS(read_prediction(dir / "n.json"), Error);
  }
}

TEST_CASE("manifests") {
  TempDir dir("manifest");
  for (const char* rel : {"b.png", "a.png", "sub/c.png", "sub/d.jpg", "Z.png", "notes.txt"})
    touch(dir / "data" / rel);
  const auto m = build_manifest(dir / "data", "*.png");
  std::vector<std::string> paths;
  for (const auto& e : m.entries) paths.push_back(e.path);
  CHECK(paths == std::vector<std::string>{"Z.png", "a.png", "b.png", "sub/c.png"});
  CHECK(stem_of("sub/c.png") == "c");

  touch(dir / "labels" / "a_label.png");
  touch(dir / "labels" / "b_label.png");
  touch(dir / "labels" / "sub" / "c_label.png");
  touch(dir / "labels" / "Z_label.png");
  DatasetManifest labelled = m;
  attach_labels(labelled, dir / "labels", "_label.png");
  CHECK(labelled.entries[3].label == std::optional<std::string>("sub/c_label.png"));

  save_manifest(dir / "m.json", labelled);
  const auto back = load_manifest(dir / "m.json");
  CHECK(back.root == labelled.root);
  CHECK(back.size() == 4);
  CHECK(back.entries[1].label == labelled.entries[1].label);

  CHECK_THROWS_AS(build_manifest(dir / "missing", "*"), Error);
  CHECK_THROWS_AS(manifest_from_json("{\"format\":\"fda-manifest\",\"version\":1,\"root\":\"/\","
                                     "\"entries\":[{\"path\":\"b\"},{\"path\":\"a\"}]}"),
                  Error);
}
