#include "sqzmode/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

#include "sqzmode/error.hpp"

namespace sqzmode {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

std::size_t parse_header_number(const std::string& token, const std::filesystem::path& path) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw IoError("malformed PGM header in " + path.string());
  }
  return value;
}

void check_image(const GrayImage& image) {
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height) {
    throw InvalidArgument("image dimensions do not match its pixel buffer");
  }
  if (image.maxval == 0 || image.maxval > 65535) throw InvalidArgument("image maxval must be in [1, 65535]");
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw IoError(path.string() + " is not a binary PGM (P5)");
  GrayImage image;
  image.width = parse_header_number(pgm_token(in), path);
  image.height = parse_header_number(pgm_token(in), path);
  const std::size_t maxval = parse_header_number(pgm_token(in), path);
  if (image.width == 0 || image.height == 0 || maxval == 0 || maxval > 65535) {
    throw IoError("unsupported PGM geometry in " + path.string());
  }
  image.maxval = static_cast<unsigned>(maxval);
  const std::size_t count = image.width * image.height;
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM data in " + path.string());
  image.pixels.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    image.pixels[k] = bytes_per == 2 ? static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]) : raw[k];
    if (image.pixels[k] > maxval) throw IoError("PGM sample exceeds maxval in " + path.string());
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  check_image(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  const bool wide = image.maxval > 255;
  std::vector<unsigned char> raw;
  raw.reserve(image.pixels.size() * (wide ? 2 : 1));
  for (auto p : image.pixels) {
    if (wide) raw.push_back(static_cast<unsigned char>(p >> 8));
    raw.push_back(static_cast<unsigned char>(p & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

GrayImage read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  GrayImage image;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> raw;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG " + path.string());
  }
  if (info == nullptr) png_error(png, "no info struct");
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);
  image.width = png_get_image_width(png, info);
  image.height = png_get_image_height(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * image.height);
  rows.resize(image.height);
  for (std::size_t v = 0; v < image.height; ++v) rows[v] = raw.data() + v * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image.maxval = out_depth == 16 ? 65535 : 255;
  image.pixels.resize(image.width * image.height);
  for (std::size_t v = 0; v < image.height; ++v) {
    const unsigned char* row = raw.data() + v * stride;
    for (std::size_t u = 0; u < image.width; ++u) {
      image.pixels[v * image.width + u] =
          out_depth == 16 ? static_cast<std::uint16_t>((row[2 * u] << 8) | row[2 * u + 1]) : row[u];
    }
  }
  return image;
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  check_image(image);
  if (image.maxval != 255 && image.maxval != 65535) throw InvalidArgument("PNG export needs maxval 255 or 65535");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  const bool wide = image.maxval == 65535;
  const std::size_t stride = image.width * (wide ? 2 : 1);
  std::vector<unsigned char> raw(stride * image.height);
  std::vector<png_bytep> rows(image.height);
  for (std::size_t v = 0; v < image.height; ++v) {
    unsigned char* row = raw.data() + v * stride;
    rows[v] = row;
    for (std::size_t u = 0; u < image.width; ++u) {
      const auto p = image.pixels[v * image.width + u];
      if (wide) {
        row[2 * u] = static_cast<unsigned char>(p >> 8);
        row[2 * u + 1] = static_cast<unsigned char>(p & 0xff);
      } else {
        row[u] = static_cast<unsigned char>(p);
      }
    }
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG " + path.string());
  }
  if (info == nullptr) png_error(png, "no info struct");
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
               wide ? 16 : 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_gray_image(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".png") return read_png(path);
  throw IoError("unsupported image format: " + path.string());
}

IntensityImage to_intensity(const GrayImage& image) {
  check_image(image);
  IntensityImage out{image.width, image.height, std::vector<double>(image.pixels.size())};
  const double scale = 1.0 / image.maxval;
  for (std::size_t k = 0; k < image.pixels.size(); ++k) out.values[k] = image.pixels[k] * scale;
  return out;
}

GrayImage to_gray(const std::vector<double>& values, std::size_t width, std::size_t height, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("bit depth must be 8 or 16");
  if (values.size() != width * height || values.empty()) throw InvalidArgument("value count does not match image size");
  GrayImage image{width, height, bit_depth == 16 ? 65535u : 255u, std::vector<std::uint16_t>(values.size())};
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) return image;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double scaled = std::clamp(values[k] / peak, 0.0, 1.0) * image.maxval;
    image.pixels[k] = static_cast<std::uint16_t>(std::lround(scaled));
  }
  return image;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    CsvRow row;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < stripped.size(); ++k) {
      const char c = stripped[k];
      if (c == '"') {
        if (quoted && k + 1 < stripped.size() && stripped[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = !quoted;
        }
      } else if (c == ',' && !quoted) {
        row.push_back(trim(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    if (quoted) throw IoError("unterminated quote in " + path.string());
    row.push_back(trim(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  auto emit = [&out](const CsvRow& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      const std::string& f = row[k];
      if (f.find_first_of(",\"\n") == std::string::npos) {
        out << f;
        continue;
      }
      out << '"';
      for (char c : f) out << (c == '"' ? "\"\"" : std::string(1, c));
      out << '"';
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace sqzmode
