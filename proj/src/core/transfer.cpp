#include "transfer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "error.hpp"

namespace fda {

void validate_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
  {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, beta).ptr;
    throw invalid_argument("beta must lie in [0, 1], got " + std::string(buf, end));
  }
}

namespace {

std::size_t half_extent(double beta, std::size_t bins) {
  return static_cast<std::size_t>(std::floor(beta * static_cast<double>(bins)));
}

}  // namespace

BetaMask::BetaMask(std::size_t height, std::size_t width, double beta)
    : height_(height), width_(width), beta_(beta) {
  if (height == 0 || width == 0) throw invalid_argument("mask dimensions must be positive");
  validate_beta(beta);
  half_height_ = half_extent(beta, height);
  half_width_ = half_extent(beta, width);
  const std::size_t cr = height / 2;
  const std::size_t cc = width / 2;
  row_begin_ = cr - std::min(half_height_, cr);
  row_end_ = std::min(cr + half_height_, height - 1) + 1;
  col_begin_ = cc - std::min(half_width_, cc);
  col_end_ = std::min(cc + half_width_, width - 1) + 1;
}

std::vector<unsigned char> BetaMask::bits() const {
  std::vector<unsigned char> out(height_ * width_, 0);
  for (std::size_t m = row_begin_; m < row_end_; ++m)
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(m * width_ + col_begin_),
              out.begin() + static_cast<std::ptrdiff_t>(m * width_ + col_end_), 1);
  return out;
}

BetaMask build_mask(std::size_t height, std::size_t width, double beta) {
  return BetaMask(height, width, beta);
}

PreparedPair prepare_pair(const RasterImage& source, const RasterImage& target) {
  if (!source.same_shape(target))
    throw dimension_mismatch(
        "source and target differ in size; resize the target to the source dimensions first");
  source.validate_intensity_range();
  target.validate_intensity_range();
  return PreparedPair{forward_fft(source), forward_fft(target)};
}

std::vector<ChannelSpectrum> mix_spectra(std::span<const ChannelSpectrum> source,
                                         std::span<const ChannelSpectrum> target, double beta,
                                         const TransferOptions& options) {
  validate_beta(beta);
  if (source.empty() || source.size() != target.size())
    throw dimension_mismatch("prepared pair has inconsistent channel counts");
  const std::size_t H = source.front().height();
  const std::size_t W = source.front().width();
  for (std::size_t c = 0; c < source.size(); ++c)
    if (source[c].height() != H || source[c].width() != W || target[c].height() != H ||
        target[c].width() != W)
      throw dimension_mismatch("source and target spectra differ in size");

  std::vector<ChannelSpectrum> mixed(source.begin(), source.end());
  if (!(options.strict_zero && beta == 0.0)) {
    const BetaMask mask(H, W, beta);
    for (std::size_t c = 0; c < mixed.size(); ++c) {
      const auto& tgt = target[c];
      auto& out = mixed[c];
      for (std::size_t m = mask.row_begin(); m < mask.row_end(); ++m) {
        for (std::size_t n = mask.col_begin(); n < mask.col_end(); ++n) {
          // Keep the source phase, take the target modulus.
          const Complex s = out.at(m, n);
          const double a_src = std::abs(s);
          const double a_tgt = std::abs(tgt.at(m, n));
          out.at(m, n) = (a_src > 0.0) ? (s / a_src) * a_tgt : Complex(a_tgt, 0.0);
        }
      }
    }
  }
  return mixed;
}

std::vector<ChannelSpectrum> mix_spectra(const PreparedPair& pair, double beta,
                                         const TransferOptions& options) {
  return mix_spectra(pair.source, pair.target, beta, options);
}

TransferResult transfer_prepared(const PreparedPair& pair, double beta,
                                 const TransferOptions& options) {
  return transfer_spectra(pair.source, pair.target, beta, options);
}

TransferResult transfer_spectra(std::span<const ChannelSpectrum> source,
                                std::span<const ChannelSpectrum> target, double beta,
                                const TransferOptions& options) {
  // The mask is closed under the centre mirror and the mixing rule commutes
  // with conjugation, so spectra of real images stay conjugate-symmetric.
  InverseResult inv = inverse_fft_real(mix_spectra(source, target, beta, options));
  TransferResult result;
  result.beta = beta;
  result.max_imaginary_residual = inv.max_imaginary_residual;
  if (options.clamp) {
    for (double& v : inv.image.samples()) {
      if (v < 0.0) {
        v = 0.0;
        ++result.clamp_count;
      } else if (v > 255.0) {
        v = 255.0;
        ++result.clamp_count;
      }
    }
  }
  result.adapted = std::move(inv.image);
  return result;
}

TransferResult spectral_transfer(const RasterImage& source, const RasterImage& target, double beta,
                                 const TransferOptions& options) {
  validate_beta(beta);
  return transfer_prepared(prepare_pair(source, target), beta, options);
}

std::vector<TransferResult> multi_beta_transfer(const RasterImage& source,
                                                const RasterImage& target,
                                                std::span<const double> betas,
                                                const TransferOptions& options) {
  if (betas.empty()) throw invalid_argument("at least one beta is required");
  for (double b : betas) validate_beta(b);
  const PreparedPair pair = prepare_pair(source, target);
  std::vector<TransferResult> results;
  results.reserve(betas.size());
  for (double b : betas) results.push_back(transfer_prepared(pair, b, options));
  return results;
}

double swapped_energy(const PreparedPair& pair, const BetaMask& mask) {
  double energy = 0.0;
  for (std::size_t c = 0; c < pair.source.size(); ++c) {
    const auto& src = pair.source[c];
    const auto& tgt = pair.target[c];
    if (src.height() != mask.height() || src.width() != mask.width())
      throw dimension_mismatch("mask and spectra differ in size");
    for (std::size_t m = mask.row_begin(); m < mask.row_end(); ++m)
      for (std::size_t n = mask.col_begin(); n < mask.col_end(); ++n) {
        const double d = std::abs(tgt.at(m, n)) - std::abs(src.at(m, n));
        energy += d * d;
      }
  }
  return energy;
}

}  // namespace fda
