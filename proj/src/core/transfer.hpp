#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spectral.hpp"

namespace fda {

// Binary low-frequency mask over a DC-centred spectrum. A bin is set when its
// row and column lie within floor(beta*H) / floor(beta*W) bins of the DC bin
// (inclusive), so the region always contains DC and has odd side lengths
// until it saturates at the full axis.
class BetaMask {
 public:
  BetaMask(std::size_t height, std::size_t width, double beta);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  double beta() const noexcept { return beta_; }
  std::size_t half_height() const noexcept { return half_height_; }
  std::size_t half_width() const noexcept { return half_width_; }

  // Inclusive row/column ranges of set bins.
  std::size_t row_begin() const noexcept { return row_begin_; }
  std::size_t row_end() const noexcept { return row_end_; }
  std::size_t col_begin() const noexcept { return col_begin_; }
  std::size_t col_end() const noexcept { return col_end_; }

  bool contains(std::size_t m, std::size_t n) const noexcept {
    return m >= row_begin_ && m < row_end_ && n >= col_begin_ && n < col_end_;
  }
  std::size_t popcount() const noexcept {
    return (row_end_ - row_begin_) * (col_end_ - col_begin_);
  }
  // Dense 0/1 bits, row-major.
  std::vector<unsigned char> bits() const;

 private:
  std::size_t height_;
  std::size_t width_;
  double beta_;
  std::size_t half_height_;
  std::size_t half_width_;
  std::size_t row_begin_;
  std::size_t row_end_;  // exclusive
  std::size_t col_begin_;
  std::size_t col_end_;  // exclusive
};

BetaMask build_mask(std::size_t height, std::size_t width, double beta);

struct TransferOptions {
  // beta == 0 returns the source untouched instead of swapping the DC bin.
  bool strict_zero = false;
  // Clamp the reconstructed image to [0, 255]. Disable only for analysis.
  bool clamp = true;
};

struct TransferResult {
  RasterImage adapted;
  double beta = 0.0;
  double max_imaginary_residual = 0.0;
  std::size_t clamp_count = 0;  // samples pulled back into [0, 255]
};

// Source and target spectra computed once and reused across several betas.
struct PreparedPair {
  std::vector<ChannelSpectrum> source;
  std::vector<ChannelSpectrum> target;
};

PreparedPair prepare_pair(const RasterImage& source, const RasterImage& target);

// Low-frequency amplitude of the target replaces that of the source; source
// phase is kept throughout.
TransferResult spectral_transfer(const RasterImage& source, const RasterImage& target, double beta,
                                 const TransferOptions& options = {});

// Mixed spectra before the inverse transform.
std::vector<ChannelSpectrum> mix_spectra(std::span<const ChannelSpectrum> source,
                                         std::span<const ChannelSpectrum> target, double beta,
                                         const TransferOptions& options = {});
std::vector<ChannelSpectrum> mix_spectra(const PreparedPair& pair, double beta,
                                         const TransferOptions& options = {});

TransferResult transfer_spectra(std::span<const ChannelSpectrum> source,
                                std::span<const ChannelSpectrum> target, double beta,
                                const TransferOptions& options = {});

TransferResult transfer_prepared(const PreparedPair& pair, double beta,
                                 const TransferOptions& options = {});

// One result per beta, in input order; the forward transforms are shared.
std::vector<TransferResult> multi_beta_transfer(const RasterImage& source,
                                                const RasterImage& target,
                                                std::span<const double> betas,
                                                const TransferOptions& options = {});

// Sum over channels and masked bins of (A_target - A_source)^2: the spectral
// energy the swap changes. Non-decreasing in beta because masks are nested.
double swapped_energy(const PreparedPair& pair, const BetaMask& mask);

void validate_beta(double beta);

}  // namespace fda
