#include "image_io.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "error.hpp"

namespace fda {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw io_error("cannot open " + path.string());
  return f;
}

std::vector<unsigned char> read_signature(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::vector<unsigned char> sig(n, 0);
  in.read(reinterpret_cast<char*>(sig.data()), static_cast<std::streamsize>(n));
  sig.resize(static_cast<std::size_t>(in.gcount()));
  return sig;
}

RasterImage load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0)
    throw io_error("PNG decode failed for " + path.string() + ": " + image.message);
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = colour ? 3 : 1;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  // A null background composites any alpha onto black.
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw io_error("PNG decode failed for " + path.string() + ": " + msg);
  }
  return dequantize(image.height, image.width, channels, buffer);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Plain-C decode loop: nothing with a destructor may live across setjmp.
bool decode_jpeg(std::FILE* file, std::vector<std::uint8_t>& pixels, std::size_t& height,
                 std::size_t& width, std::size_t& channels, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.message[0] = '\0';
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  height = cinfo.output_height;
  width = cinfo.output_width;
  channels = static_cast<std::size_t>(cinfo.output_components);
  pixels.resize(height * width * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

RasterImage load_jpeg(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  std::vector<std::uint8_t> pixels;
  std::size_t h = 0, w = 0, c = 0;
  char message[JMSG_LENGTH_MAX] = {0};
  if (!decode_jpeg(file.get(), pixels, h, w, c, message))
    throw io_error("JPEG decode failed for " + path.string() + ": " + message);
  return dequantize(h, w, c, pixels);
}

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
  const auto sig = read_signature(path, 8);
  if (sig.size() >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return load_png(path);
  if (sig.size() >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return load_jpeg(path);
  throw io_error("unrecognised image format: " + path.string());
}

std::vector<std::uint8_t> quantize(const RasterImage& image) {
  const auto samples = image.samples();
  std::vector<std::uint8_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::clamp(samples[i], 0.0, 255.0);
    out[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
  }
  return out;
}

RasterImage dequantize(std::size_t height, std::size_t width, std::size_t channels,
                       std::span<const std::uint8_t> pixels) {
  std::vector<double> samples(pixels.begin(), pixels.end());
  return RasterImage(height, width, channels, std::move(samples));
}

void save_png(const std::filesystem::path& path, const RasterImage& image) {
  const auto pixels = quantize(image);
  save_png_u8(path, image.height(), image.width(), image.channels(), pixels);
}

namespace {

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteState() { png_destroy_write_struct(&png, &info); }
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text != nullptr) *text = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

bool encode_png(std::FILE* file, PngWriteState& state, std::string& error, std::size_t height,
                std::size_t width, std::size_t channels, const std::uint8_t* pixels) {
  state.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler,
                                      png_warning_handler);
  if (state.png == nullptr) return false;
  state.info = png_create_info_struct(state.png);
  if (state.info == nullptr) return false;
  if (setjmp(png_jmpbuf(state.png))) return false;
  png_init_io(state.png, file);
  // Throughput matters more than file size for generated datasets.
  png_set_compression_level(state.png, Z_BEST_SPEED);
  png_set_filter(state.png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_IHDR(state.png, state.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
  png_write_info(state.png, state.info);
  for (std::size_t r = 0; r < height; ++r)
    png_write_row(state.png, pixels + r * width * channels);
  png_write_end(state.png, nullptr);
  return true;
}

}  // namespace

void save_png_u8(const std::filesystem::path& path, std::size_t height, std::size_t width,
                 std::size_t channels, std::span<const std::uint8_t> pixels) {
  if (channels != 1 && channels != 3) throw invalid_argument("PNG output needs 1 or 3 channels");
  if (pixels.size() != height * width * channels)
    throw invalid_argument("pixel buffer does not match PNG dimensions");
  FilePtr file = open_file(path, "wb");
  PngWriteState state;
  std::string error;
  if (!encode_png(file.get(), state, error, height, width, channels, pixels.data()))
    throw io_error("PNG encode failed for " + path.string() + ": " + error);
  if (std::fflush(file.get()) != 0) throw io_error("write failed for " + path.string());
}

RasterImage hconcat(std::span<const RasterImage> panels) {
  if (panels.empty()) throw invalid_argument("hconcat needs at least one panel");
  const std::size_t H = panels.front().height();
  const std::size_t C = panels.front().channels();
  std::size_t W = 0;
  for (const auto& p : panels) {
    if (p.height() != H || p.channels() != C)
      throw dimension_mismatch("hconcat panels differ in height or channel count");
    W += p.width();
  }
  RasterImage out(H, W, C);
  std::size_t offset = 0;
  for (const auto& p : panels) {
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t w = 0; w < p.width(); ++w)
        for (std::size_t c = 0; c < C; ++c) out.at(h, offset + w, c) = p.at(h, w, c);
    offset += p.width();
  }
  return out;
}

}  // namespace fda
