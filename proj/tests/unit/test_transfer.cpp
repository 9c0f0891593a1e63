#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "image_io.hpp"
#include "oracles/oracles.hpp"
#include "support/support.hpp"
#include "transfer.hpp"

using namespace fda;

namespace {

RasterImage random_image(std::mt19937_64& rng, std::size_t H, std::size_t W, std::size_t C) {
  return RasterImage(H, W, C, testing_support::random_samples(rng, H * W * C));
}

std::vector<double> as_vector(const RasterImage& img) {
  return {img.samples().begin(), img.samples().end()};
}

}  // namespace

TEST_CASE("mask geometry") {
  SUBCASE("full-scale example") {
    const auto m = build_mask(512, 1024, 0.1);
    CHECK(m.half_height() == 51);
    CHECK(m.half_width() == 102);
    CHECK(m.popcount() == 103 * 205);
  }
  SUBCASE("beta zero keeps only the zero frequency") {
    const auto m = build_mask(8, 6, 0.0);
    CHECK(m.popcount() == 1);
    CHECK(m.contains(4, 3));
  }
  SUBCASE("large beta covers everything") {
    for (double beta : {0.5, 0.75, 1.0}) CHECK(build_mask(7, 10, beta).popcount() == 70);
  }
  SUBCASE("matches the window predicate bin by bin") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const std::size_t H = 1 + rng() % 24, W = 1 + rng() % 24;
      const double beta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto m = build_mask(H, W, beta);
      const auto bits = m.bits();
      for (std::size_t r = 0; r < H; ++r)
        for (std::size_t c = 0; c < W; ++c)
          REQUIRE(static_cast<bool>(bits[r * W + c]) == oracle::in_window(r, c, H, W, beta));
    }
  }
  SUBCASE("mask is closed under the centre mirror") {
    for (auto [H, W] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 9}, {6, 5}})
      for (double beta : {0.0, 0.1, 0.2, 0.3, 0.45}) {
        const auto m = build_mask(H, W, beta);
        for (std::size_t r = 0; r < H; ++r)
          for (std::size_t c = 0; c < W; ++c) {
            if (!m.contains(r, c)) continue;
            // Mirror within the window is only guaranteed when it fits the grid.
            if (2 * m.half_height() + 1 > H || 2 * m.half_width() + 1 > W) continue;
            CHECK(m.contains((2 * (H / 2) + H - r) % H, (2 * (W / 2) + W - c) % W));
          }
      }
  }
  SUBCASE("rejects bad beta and empty grids") {
    CHECK_THROWS_AS(build_mask(4, 4, -0.01), Error);
    CHECK_THROWS_AS(build_mask(4, 4, 1.5), Error);
    CHECK_THROWS_AS(build_mask(4, 4, std::nan("")), Error);
    CHECK_THROWS_AS(build_mask(0, 4, 0.1), Error);
  }
}

TEST_CASE("transfer agrees with the brute-force oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t H = 3 + rng() % 6, W = 3 + rng() % 6;
    const RasterImage src = random_image(rng, H, W, 3);
    const RasterImage tgt = random_image(rng, H, W, 3);
    for (double beta : {0.0, 0.1, 0.2, 0.34, 1.0}) {
      const auto got = spectral_transfer(src, tgt, beta, {.strict_zero = false, .clamp = false});
      const auto want = oracle::transfer(as_vector(src), as_vector(tgt), H, W, 3, beta);
      for (std::size_t i = 0; i < want.image.size(); ++i)
        REQUIRE(std::abs(got.adapted.samples()[i] - want.image[i]) < 1e-9);
      CHECK(got.max_imaginary_residual < 1e-9);
    }
  }
}

TEST_CASE("full-coverage transfer reproduces the target amplitude") {
  std::mt19937_64 rng(13);
  const RasterImage src = random_image(rng, 16, 12, 3);
  const RasterImage tgt = random_image(rng, 16, 12, 3);
  const auto out = spectral_transfer(src, tgt, 1.0, {.strict_zero = false, .clamp = false});
  const auto a_out = split_amplitude_phase(forward_fft(out.adapted));
  const auto a_tgt = split_amplitude_phase(forward_fft(tgt));
  for (std::size_t i = 0; i < a_out.amplitude.size(); ++i)
    CHECK(a_out.amplitude[i] == doctest::Approx(a_tgt.amplitude[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("beta zero: default swaps the mean, strict mode is the identity") {
  std::mt19937_64 rng(14);
  const RasterImage src = random_image(rng, 10, 9, 3);
  RasterImage tgt(10, 9, 3, std::vector<double>(270, 40.0));
  const auto strict = spectral_transfer(src, tgt, 0.0, {.strict_zero = true, .clamp = true});
  CHECK(quantize(strict.adapted) == quantize(src));
  const auto swapped = spectral_transfer(src, tgt, 0.0, {.strict_zero = false, .clamp = false});
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t p = 0; p < 90; ++p) mean += swapped.adapted.samples()[p * 3 + c];
    CHECK(mean / 90.0 == doctest::Approx(40.0).epsilon(1e-12));
  }
}

TEST_CASE("transferring an image onto itself is the identity") {
  std::mt19937_64 rng(15);
  const RasterImage img = random_image(rng, 11, 14, 3);
  for (double beta : {0.0, 0.05, 0.3, 1.0}) {
    const auto out = spectral_transfer(img, img, beta);
    CHECK(quantize(out.adapted) == quantize(img));
    CHECK(out.clamp_count == 0);
  }
}

TEST_CASE("clamping counts samples pulled into range") {
  RasterImage src(4, 4, 1, std::vector<double>(16, 0.0));
  src.at(0, 0, 0) = 255.0;
  RasterImage tgt(4, 4, 1, std::vector<double>(16, 0.0));
  tgt.at(2, 2, 0) = 255.0;
  tgt.at(1, 3, 0) = 255.0;
  const auto raw = spectral_transfer(src, tgt, 1.0, {.strict_zero = false, .clamp = false});
  std::size_t outside = 0;
  for (double v : raw.adapted.samples()) outside += (v < 0.0 || v > 255.0) ? 1 : 0;
  const auto clamped = spectral_transfer(src, tgt, 1.0);
  CHECK(clamped.clamp_count == outside);
  for (double v : clamped.adapted.samples()) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
  }
}

TEST_CASE("multi-beta transfer equals independent single transfers") {
  std::mt19937_64 rng(16);
  const RasterImage src = random_image(rng, 20, 24, 3);
  const RasterImage tgt = random_image(rng, 20, 24, 3);
  const std::vector<double> betas{0.01, 0.05, 0.09};
  const auto many = multi_beta_transfer(src, tgt, betas);
  REQUIRE(many.size() == 3);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const auto one = spectral_transfer(src, tgt, betas[i]);
    CHECK(many[i].beta == betas[i]);
    CHECK(std::equal(one.adapted.samples().begin(), one.adapted.samples().end(),
                     many[i].adapted.samples().begin()));
  }
}

TEST_CASE("swapped energy grows with the window") {
  std::mt19937_64 rng(17);
  const auto pair = prepare_pair(random_image(rng, 32, 32, 3), random_image(rng, 32, 32, 3));
  double prev = -1.0;
  for (double beta : {0.0, 0.05, 0.1, 0.2, 0.5}) {
    const double e = swapped_energy(pair, build_mask(32, 32, beta));
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("transfer input errors") {
  std::mt19937_64 rng(18);
  const RasterImage a = random_image(rng, 4, 4, 3);
  const RasterImage b = random_image(rng, 4, 5, 3);
  CHECK_THROWS_AS(spectral_transfer(a, b, 0.1), Error);
  CHECK_THROWS_AS(spectral_transfer(a, a, 1.01), Error);
  RasterImage bad = a;
  bad.at(0, 0, 0) = 300.0;
  CHECK_THROWS_AS(spectral_transfer(bad, a, 0.1), Error);
  bad.at(0, 0, 0) = std::nan("");
  CHECK_THROWS_AS(spectral_transfer(bad, a, 0.1), Error);
}
