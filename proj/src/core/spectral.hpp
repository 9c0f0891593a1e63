#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fda {

using Complex = std::complex<double>;

// Row-major, channel-last real image. Samples are intensities on the [0, 255]
// scale; nothing here quantizes them.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(std::size_t height, std::size_t width, std::size_t channels);
  RasterImage(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<double> samples);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  double& at(std::size_t h, std::size_t w, std::size_t c) {
    return samples_[(h * width_ + w) * channels_ + c];
  }
  double at(std::size_t h, std::size_t w, std::size_t c) const {
    return samples_[(h * width_ + w) * channels_ + c];
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }

  bool same_shape(const RasterImage& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  // Throws unless every sample is finite.
  void validate_finite() const;
  // Throws unless every sample is finite and inside [0, 255].
  void validate_intensity_range() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> samples_;
};

// Complex 2D spectrum of one channel, stored DC-centred: the zero-frequency
// bin lives at (height/2, width/2) (integer division).
class ChannelSpectrum {
 public:
  ChannelSpectrum() = default;
  ChannelSpectrum(std::size_t height, std::size_t width);
  ChannelSpectrum(std::size_t height, std::size_t width, std::vector<Complex> coefficients);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t center_row() const noexcept { return height_ / 2; }
  std::size_t center_col() const noexcept { return width_ / 2; }

  Complex& at(std::size_t m, std::size_t n) { return coefficients_[m * width_ + n]; }
  const Complex& at(std::size_t m, std::size_t n) const { return coefficients_[m * width_ + n]; }

  // Index of the bin mirrored through the DC bin, i.e. frequency (-u, -v).
  std::size_t mirror_row(std::size_t m) const noexcept {
    return (2 * center_row() + height_ - m) % height_;
  }
  std::size_t mirror_col(std::size_t n) const noexcept {
    return (2 * center_col() + width_ - n) % width_;
  }

  std::span<const Complex> coefficients() const noexcept { return coefficients_; }
  std::span<Complex> coefficients() noexcept { return coefficients_; }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Complex> coefficients_;
};

// Amplitude / phase planes for all channels, channel-major: plane c holds
// height*width bins in the same DC-centred layout as ChannelSpectrum.
struct AmplitudePhase {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> amplitude;
  std::vector<double> phase;

  std::size_t index(std::size_t m, std::size_t n, std::size_t c) const noexcept {
    return (c * height + m) * width + n;
  }
};

struct InverseResult {
  RasterImage image;
  // Largest |imag| seen in the inverse transform before the real part was kept.
  double max_imaginary_residual = 0.0;
};

// Unnormalized forward 2D DFT of every channel, DC-centred.
std::vector<ChannelSpectrum> forward_fft(const RasterImage& image);
ChannelSpectrum forward_fft_channel(const RasterImage& image, std::size_t channel);

// Inverse 2D DFT with 1/(HW) scaling; keeps the real part, unclamped.
InverseResult inverse_fft(std::span<const ChannelSpectrum> spectra);

// True when every bin equals the exact conjugate of its mirror bin.
bool is_conjugate_symmetric(const ChannelSpectrum& spectrum);

// Same contract as inverse_fft. Exactly conjugate-symmetric input takes a
// real-output transform whose imaginary part is identically zero; anything
// else goes through inverse_fft.
InverseResult inverse_fft_real(std::span<const ChannelSpectrum> spectra);

AmplitudePhase split_amplitude_phase(std::span<const ChannelSpectrum> spectra);
std::vector<ChannelSpectrum> recombine(const AmplitudePhase& ap);

}  // namespace fda
