#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "error.hpp"

namespace fda {

RasterImage::RasterImage(std::size_t height, std::size_t width, std::size_t channels)
    : RasterImage(height, width, channels, std::vector<double>(height * width * channels, 0.0)) {}

RasterImage::RasterImage(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<double> samples)
    : height_(height), width_(width), channels_(channels), samples_(std::move(samples)) {
  if (height == 0 || width == 0) throw invalid_argument("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw invalid_argument("image must have 1 or 3 channels");
  if (samples_.size() != height * width * channels)
    throw invalid_argument("sample count does not match image dimensions");
}

void RasterImage::validate_finite() const {
  for (double v : samples_)
    if (!std::isfinite(v)) throw invalid_argument("image contains a non-finite sample");
}

void RasterImage::validate_intensity_range() const {
  for (double v : samples_) {
    if (!std::isfinite(v)) throw invalid_argument("image contains a non-finite sample");
    if (v < 0.0 || v > 255.0) throw invalid_argument("image sample outside [0, 255]");
  }
}

ChannelSpectrum::ChannelSpectrum(std::size_t height, std::size_t width)
    : ChannelSpectrum(height, width, std::vector<Complex>(height * width)) {}

ChannelSpectrum::ChannelSpectrum(std::size_t height, std::size_t width,
                                 std::vector<Complex> coefficients)
    : height_(height), width_(width), coefficients_(std::move(coefficients)) {
  if (height == 0 || width == 0) throw invalid_argument("spectrum dimensions must be positive");
  if (coefficients_.size() != height * width)
    throw invalid_argument("coefficient count does not match spectrum dimensions");
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using AlignedBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

AlignedBuffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw Error(ErrorCode::kInternal, "fftw_malloc failed");
  return AlignedBuffer(p);
}

enum class PlanKind { kForwardComplex, kBackwardComplex, kForwardReal, kBackwardReal };

// FFTW planning is not thread-safe; the new-array execute functions on fresh
// fftw_malloc'd arrays are. Plans are created once per (H, W, kind) and live
// for the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t height, std::size_t width, PlanKind kind) {
    const auto key = std::make_tuple(height, width, kind);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    AlignedBuffer a = allocate(height * width);
    AlignedBuffer b = allocate(height * width);
    const int h = static_cast<int>(height);
    const int w = static_cast<int>(width);
    auto* real = reinterpret_cast<double*>(a.get());
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::kForwardComplex:
        plan = fftw_plan_dft_2d(h, w, a.get(), b.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      case PlanKind::kBackwardComplex:
        plan = fftw_plan_dft_2d(h, w, a.get(), b.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
      case PlanKind::kForwardReal:
        plan = fftw_plan_dft_r2c_2d(h, w, real, b.get(), FFTW_ESTIMATE);
        break;
      case PlanKind::kBackwardReal:
        plan = fftw_plan_dft_c2r_2d(h, w, b.get(), real, FFTW_ESTIMATE);
        break;
    }
    if (plan == nullptr) throw Error(ErrorCode::kInternal, "FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, PlanKind>, fftw_plan> plans_;
};

// Centred index of natural frequency index k on an axis of length n.
std::size_t centred_index(std::size_t k, std::size_t n) {
  const std::size_t m = k + n / 2;
  return m >= n ? m - n : m;
}

void validate_channel_set(std::span<const ChannelSpectrum> spectra) {
  if (spectra.empty()) throw invalid_argument("inverse_fft needs at least one spectrum");
  const std::size_t H = spectra.front().height();
  const std::size_t W = spectra.front().width();
  for (const auto& s : spectra)
    if (s.height() != H || s.width() != W)
      throw dimension_mismatch("inverse_fft: channel spectra have different dimensions");
  if (spectra.size() != 1 && spectra.size() != 3)
    throw invalid_argument("inverse_fft: expected 1 or 3 channel spectra");
}

}  // namespace

ChannelSpectrum forward_fft_channel(const RasterImage& image, std::size_t channel) {
  const std::size_t H = image.height();
  const std::size_t W = image.width();
  const std::size_t C = image.channels();
  if (channel >= C) throw invalid_argument("channel index out of range");

  const std::size_t half = W / 2 + 1;
  AlignedBuffer in = allocate(H * W);
  AlignedBuffer out = allocate(H * half);
  auto* real = reinterpret_cast<double*>(in.get());
  const auto samples = image.samples();
  for (std::size_t i = 0; i < H * W; ++i) {
    const double v = samples[i * C + channel];
    if (!std::isfinite(v)) throw invalid_argument("image contains a non-finite sample");
    real[i] = v;
  }
  fftw_execute_dft_r2c(PlanCache::instance().get(H, W, PlanKind::kForwardReal), real, out.get());

  // The real-input transform stores columns 0..W/2; the rest follow from
  // X[k][l] = conj(X[-k][-l]). Columns that are their own mirror are made
  // exactly conjugate-symmetric so the spectrum round-trips through c2r.
  std::vector<Complex> centred(H * W);
  for (std::size_t k = 0; k < H; ++k) {
    const std::size_t km = (H - k) % H;
    const std::size_t m = centred_index(k, H);
    const std::size_t mm = centred_index(km, H);
    for (std::size_t l = 0; l < half; ++l) {
      const fftw_complex& v = out[k * half + l];
      Complex x(v[0], v[1]);
      const bool self_mirror = l == 0 || 2 * l == W;
      if (self_mirror) {
        if (k == km) {
          x.imag(0.0);
        } else if (k > km) {
          const fftw_complex& u = out[km * half + l];
          x = Complex(u[0], -u[1]);
        }
      }
      centred[m * W + centred_index(l, W)] = x;
      if (!self_mirror) centred[mm * W + centred_index(W - l, W)] = std::conj(x);
    }
  }
  return ChannelSpectrum(H, W, std::move(centred));
}

std::vector<ChannelSpectrum> forward_fft(const RasterImage& image) {
  std::vector<ChannelSpectrum> spectra;
  spectra.reserve(image.channels());
  for (std::size_t c = 0; c < image.channels(); ++c)
    spectra.push_back(forward_fft_channel(image, c));
  return spectra;
}

InverseResult inverse_fft(std::span<const ChannelSpectrum> spectra) {
  validate_channel_set(spectra);
  const std::size_t H = spectra.front().height();
  const std::size_t W = spectra.front().width();
  const std::size_t C = spectra.size();

  InverseResult result{RasterImage(H, W, C), 0.0};
  auto samples = result.image.samples();
  AlignedBuffer in = allocate(H * W);
  AlignedBuffer out = allocate(H * W);
  fftw_plan plan = PlanCache::instance().get(H, W, PlanKind::kBackwardComplex);
  const double scale = 1.0 / static_cast<double>(H * W);

  for (std::size_t c = 0; c < C; ++c) {
    const auto coeffs = spectra[c].coefficients();
    // ifftshift back to natural frequency order.
    for (std::size_t k = 0; k < H; ++k) {
      const std::size_t m = centred_index(k, H);
      for (std::size_t l = 0; l < W; ++l) {
        const Complex v = coeffs[m * W + centred_index(l, W)];
        in[k * W + l][0] = v.real();
        in[k * W + l][1] = v.imag();
      }
    }
    fftw_execute_dft(plan, in.get(), out.get());
    for (std::size_t i = 0; i < H * W; ++i) {
      samples[i * C + c] = out[i][0] * scale;
      result.max_imaginary_residual =
          std::max(result.max_imaginary_residual, std::abs(out[i][1] * scale));
    }
  }
  return result;
}

bool is_conjugate_symmetric(const ChannelSpectrum& spectrum) {
  const std::size_t H = spectrum.height();
  const std::size_t W = spectrum.width();
  const auto coeffs = spectrum.coefficients();
  for (std::size_t k = 0; k < H; ++k) {
    const std::size_t m = centred_index(k, H);
    const std::size_t mm = centred_index((H - k) % H, H);
    for (std::size_t l = 0; l < W; ++l) {
      const Complex a = coeffs[m * W + centred_index(l, W)];
      const Complex b = coeffs[mm * W + centred_index((W - l) % W, W)];
      if (a.real() != b.real() || a.imag() != -b.imag()) return false;
    }
  }
  return true;
}

InverseResult inverse_fft_real(std::span<const ChannelSpectrum> spectra) {
  validate_channel_set(spectra);
  for (const auto& s : spectra)
    if (!is_conjugate_symmetric(s)) return inverse_fft(spectra);

  const std::size_t H = spectra.front().height();
  const std::size_t W = spectra.front().width();
  const std::size_t C = spectra.size();
  const std::size_t half = W / 2 + 1;

  InverseResult result{RasterImage(H, W, C), 0.0};
  auto samples = result.image.samples();
  AlignedBuffer in = allocate(H * half);
  AlignedBuffer out = allocate(H * W);
  auto* real = reinterpret_cast<double*>(out.get());
  fftw_plan plan = PlanCache::instance().get(H, W, PlanKind::kBackwardReal);
  const double scale = 1.0 / static_cast<double>(H * W);

  for (std::size_t c = 0; c < C; ++c) {
    const auto coeffs = spectra[c].coefficients();
    for (std::size_t k = 0; k < H; ++k) {
      const std::size_t m = centred_index(k, H);
      for (std::size_t l = 0; l < half; ++l) {
        const Complex v = coeffs[m * W + centred_index(l, W)];
        in[k * half + l][0] = v.real();
        in[k * half + l][1] = v.imag();
      }
    }
    fftw_execute_dft_c2r(plan, in.get(), real);
    for (std::size_t i = 0; i < H * W; ++i) samples[i * C + c] = real[i] * scale;
  }
  return result;
}

AmplitudePhase split_amplitude_phase(std::span<const ChannelSpectrum> spectra) {
  if (spectra.empty()) throw invalid_argument("split_amplitude_phase needs at least one spectrum");
  AmplitudePhase ap;
  ap.height = spectra.front().height();
  ap.width = spectra.front().width();
  ap.channels = spectra.size();
  const std::size_t plane = ap.height * ap.width;
  ap.amplitude.resize(plane * ap.channels);
  ap.phase.resize(plane * ap.channels);
  for (std::size_t c = 0; c < ap.channels; ++c) {
    const auto& s = spectra[c];
    if (s.height() != ap.height || s.width() != ap.width)
      throw dimension_mismatch("split_amplitude_phase: channel spectra have different dimensions");
    const auto coeffs = s.coefficients();
    for (std::size_t i = 0; i < plane; ++i) {
      const Complex v = coeffs[i];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw invalid_argument("spectrum contains a non-finite coefficient");
      ap.amplitude[c * plane + i] = std::abs(v);
      // atan2 returns -pi for (-x, -0.0); fold it so phase stays in (-pi, pi].
      double phi = (v == Complex(0.0, 0.0)) ? 0.0 : std::arg(v);
      if (phi <= -std::numbers::pi) phi = std::numbers::pi;
      ap.phase[c * plane + i] = phi;
    }
  }
  return ap;
}

std::vector<ChannelSpectrum> recombine(const AmplitudePhase& ap) {
  const std::size_t plane = ap.height * ap.width;
  if (plane == 0 || ap.channels == 0) throw invalid_argument("recombine: empty amplitude/phase");
  if (ap.amplitude.size() != plane * ap.channels || ap.phase.size() != plane * ap.channels)
    throw invalid_argument("recombine: plane sizes do not match dimensions");
  std::vector<ChannelSpectrum> spectra;
  spectra.reserve(ap.channels);
  for (std::size_t c = 0; c < ap.channels; ++c) {
    std::vector<Complex> coeffs(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      const double a = ap.amplitude[c * plane + i];
      const double phi = ap.phase[c * plane + i];
      if (!(a >= 0.0) || !std::isfinite(a)) throw invalid_argument("recombine: negative amplitude");
      if (!std::isfinite(phi)) throw invalid_argument("recombine: non-finite phase");
      coeffs[i] = Complex(a * std::cos(phi), a * std::sin(phi));
    }
    spectra.emplace_back(ap.height, ap.width, std::move(coeffs));
  }
  return spectra;
}

}  // namespace fda
