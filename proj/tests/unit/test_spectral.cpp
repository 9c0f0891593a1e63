#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "oracles/oracles.hpp"
#include "spectral.hpp"
#include "support/support.hpp"

using namespace fda;

namespace {

RasterImage random_image(std::mt19937_64& rng, std::size_t H, std::size_t W, std::size_t C) {
  return RasterImage(H, W, C, testing_support::random_samples(rng, H * W * C));
}

double max_rel_error(const ChannelSpectrum& got, const std::vector<oracle::cd>& want) {
  double scale = 0.0, err = 0.0;
  for (const auto& v : want) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < want.size(); ++i)
    err = std::max(err, std::abs(got.coefficients()[i] - want[i]));
  return err / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("forward transform agrees with the direct double sum") {
  std::mt19937_64 rng(1);
  for (std::size_t H : {1, 2, 3, 5, 7, 8})
    for (std::size_t W : {1, 4, 5, 6, 8}) {
      const RasterImage img = random_image(rng, H, W, 1);
      const auto got = forward_fft_channel(img, 0);
      std::vector<double> x(img.samples().begin(), img.samples().end());
      CHECK(max_rel_error(got, oracle::dft(x, H, W)) <= 1e-12);
    }
}

TEST_CASE("zero frequency sits at the centre and holds the channel sum") {
  const RasterImage img(4, 6, 1, std::vector<double>(24, 2.5));
  const auto s = forward_fft_channel(img, 0);
  CHECK(s.center_row() == 2);
  CHECK(s.center_col() == 3);
  CHECK(s.at(2, 3).real() == doctest::Approx(60.0));
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 6; ++n)
      if (m != 2 || n != 3) CHECK(std::abs(s.at(m, n)) < 1e-12);
}

TEST_CASE("spectrum of a real image is conjugate symmetric about the centre") {
  std::mt19937_64 rng(2);
  for (auto [H, W] : {std::pair<std::size_t, std::size_t>{7, 5}, {6, 8}, {5, 6}}) {
    const auto s = forward_fft_channel(random_image(rng, H, W, 1), 0);
    for (std::size_t m = 0; m < H; ++m)
      for (std::size_t n = 0; n < W; ++n)
        CHECK(std::abs(s.at(m, n) - std::conj(s.at(s.mirror_row(m), s.mirror_col(n)))) < 1e-9);
  }
}

TEST_CASE("inverse undoes forward") {
  std::mt19937_64 rng(3);
  const RasterImage img = random_image(rng, 17, 30, 3);
  const auto spectra = forward_fft(img);
  const auto back = inverse_fft(spectra);
  CHECK(back.max_imaginary_residual < 1e-9);
  for (std::size_t i = 0; i < img.samples().size(); ++i)
    CHECK(back.image.samples()[i] == doctest::Approx(img.samples()[i]).epsilon(1e-12));
}

TEST_CASE("real-output inverse matches the complex inverse") {
  std::mt19937_64 rng(6);
  for (auto [H, W] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 9}, {6, 11}, {1, 5}, {13, 2}}) {
    const auto spectra = forward_fft(random_image(rng, H, W, 3));
    for (const auto& s : spectra) CHECK(is_conjugate_symmetric(s));
    const auto fast = inverse_fft_real(spectra);
    const auto full = inverse_fft(spectra);
    CHECK(fast.max_imaginary_residual == 0.0);
    for (std::size_t i = 0; i < full.image.samples().size(); ++i)
      CHECK(fast.image.samples()[i] == doctest::Approx(full.image.samples()[i]).epsilon(1e-12));
  }
  SUBCASE("asymmetric input falls back and reports the residual") {
    std::vector<ChannelSpectrum> s{ChannelSpectrum(4, 4)};
    s[0].at(0, 1) = Complex(0.0, 16.0);
    CHECK_FALSE(is_conjugate_symmetric(s[0]));
    CHECK(inverse_fft_real(s).max_imaginary_residual > 0.5);
  }
}

TEST_CASE("Parseval: energy is preserved up to the 1/HW factor") {
  std::mt19937_64 rng(4);
  const RasterImage img = random_image(rng, 12, 10, 1);
  const auto s = forward_fft_channel(img, 0);
  double spatial = 0.0, spectral = 0.0;
  for (double v : img.samples()) spatial += v * v;
  for (const auto& c : s.coefficients()) spectral += std::norm(c);
  CHECK(spectral / 120.0 == doctest::Approx(spatial).epsilon(1e-12));
}

TEST_CASE("amplitude/phase split and recombine round-trip") {
  std::mt19937_64 rng(5);
  const auto spectra = forward_fft(random_image(rng, 9, 8, 3));
  const auto ap = split_amplitude_phase(spectra);
  CHECK(ap.channels == 3);
  for (double a : ap.amplitude) CHECK(a >= 0.0);
  for (double p : ap.phase) {
    CHECK(p > -std::numbers::pi);
    CHECK(p <= std::numbers::pi);
  }
  const auto back = recombine(ap);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < spectra[c].coefficients().size(); ++i)
      CHECK(std::abs(back[c].coefficients()[i] - spectra[c].coefficients()[i]) < 1e-9);
}

TEST_CASE("phase of a zero coefficient is zero") {
  const RasterImage img(2, 2, 1, {1.0, 1.0, 1.0, 1.0});
  const auto ap = split_amplitude_phase(forward_fft(img));
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 2; ++n)
      if (m != 1 || n != 1) CHECK(ap.phase[ap.index(m, n, 0)] == 0.0);
}

TEST_CASE("recombine rejects negative amplitude") {
  AmplitudePhase ap;
  ap.height = ap.width = ap.channels = 1;
  ap.amplitude = {-1.0};
  ap.phase = {0.0};
  CHECK_THROWS_AS(recombine(ap), Error);
}

TEST_CASE("image validation") {
  CHECK_THROWS_AS(RasterImage(2, 2, 2), Error);
  RasterImage img(1, 1, 1, {std::nan("")});
  CHECK_THROWS_AS(img.validate_finite(), Error);
  RasterImage big(1, 1, 1, {256.0});
  CHECK_NOTHROW(big.validate_finite());
  CHECK_THROWS_AS(big.validate_intensity_range(), Error);
}
