#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sqzmode {

/// Grayscale raster as stored on disk. Row-major, row 0 at the top.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 255;  // 255 for 8-bit, 65535 for 16-bit
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(std::size_t u, std::size_t v) const noexcept { return pixels[v * width + u]; }
};

/// Pixel intensities in [0, 1] without physical sampling attached.
struct IntensityImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t u, std::size_t v) const noexcept { return values[v * width + u]; }
};

// Binary PGM (P5). Comments in the header are skipped on read; maxval up to
// 65535 with big-endian 16-bit samples.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Dispatches on extension (.pgm or .png, case-insensitive).
GrayImage read_gray_image(const std::filesystem::path& path);

IntensityImage to_intensity(const GrayImage& image);

/// Scales non-negative values by their peak into the full gray range of the
/// requested depth (8 or 16 bit). An all-zero map gives an all-zero image.
GrayImage to_gray(const std::vector<double>& values, std::size_t width, std::size_t height, int bit_depth);

using CsvRow = std::vector<std::string>;

/// Comma-separated rows. Blank lines and lines starting with '#' are
/// skipped; fields are whitespace-trimmed and may be double-quoted. The
/// writer quotes fields that contain commas or quotes.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace sqzmode
