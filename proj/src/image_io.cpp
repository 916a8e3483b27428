#include "maskopt/image_io.hpp"

#include <png.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace maskopt::io {
namespace {

struct RawPng {
  int height = 0;
  int width = 0;
  int channels = 0;
  int depth = 8;
  std::vector<std::uint16_t> samples;
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::filesystem::path& path, const RawPng& raw) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) fail(ErrorKind::Io, "cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::Io, "libpng initialization failed");
  }
  const int stride = raw.width * raw.channels;
  const int bytes = raw.depth == 16 ? 2 : 1;
  std::vector<png_byte> row(static_cast<std::size_t>(stride) * bytes);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::Io, "PNG encode failed: " + path.string());
  }
  png_init_io(png, fp.get());
  const int color = raw.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, raw.width, raw.height, raw.depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  // Fixed compression settings keep output bytes reproducible.
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int r = 0; r < raw.height; ++r) {
    const std::uint16_t* src = raw.samples.data() + static_cast<std::size_t>(r) * stride;
    for (int i = 0; i < stride; ++i) {
      if (bytes == 2) {
        row[2 * i] = static_cast<png_byte>(src[i] >> 8);
        row[2 * i + 1] = static_cast<png_byte>(src[i] & 0xff);
      } else {
        row[i] = static_cast<png_byte>(src[i]);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RawPng read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) fail(ErrorKind::Io, "cannot open: " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorKind::Io, "not a PNG file: " + path.string());
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::Io, "libpng initialization failed");
  }
  RawPng raw;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::Io, "PNG decode failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // native little-endian uint16 rows
  png_read_update_info(png, info);

  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  raw.depth = depth;
  if (raw.channels != 1 && raw.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::Io, "unsupported PNG channel layout: " + path.string());
  }
  const std::size_t stride = static_cast<std::size_t>(raw.width) * raw.channels;
  row.resize(png_get_rowbytes(png, info));
  raw.samples.resize(stride * raw.height);
  for (int r = 0; r < raw.height; ++r) {
    png_read_row(png, row.data(), nullptr);
    std::uint16_t* dst = raw.samples.data() + static_cast<std::size_t>(r) * stride;
    for (std::size_t i = 0; i < stride; ++i) {
      if (depth == 16) {
        std::uint16_t v;
        std::memcpy(&v, row.data() + 2 * i, 2);
        dst[i] = v;
      } else {
        dst[i] = row[i];
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

}  // namespace

void save_image(const std::filesystem::path& path, const Image& img, BitDepth depth) {
  RawPng raw{img.height(), img.width(), img.channels(), static_cast<int>(depth), {}};
  const double scale = depth == BitDepth::Sixteen ? 65535.0 : 255.0;
  raw.samples.reserve(img.size());
  for (float v : img.data()) {
    const double q = std::nearbyint(std::clamp(static_cast<double>(v), 0.0, 1.0) * scale);
    raw.samples.push_back(static_cast<std::uint16_t>(q));
  }
  write_png(path, raw);
}

Image load_image(const std::filesystem::path& path) {
  RawPng raw = read_png(path);
  const float scale = raw.depth == 16 ? 65535.0f : 255.0f;
  std::vector<float> data(raw.samples.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] / scale;
  return Image(raw.height, raw.width, raw.channels, std::move(data));
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  RawPng raw{mask.height(), mask.width(), 1, 8, {}};
  raw.samples.reserve(mask.size());
  for (auto v : mask.data()) raw.samples.push_back(v ? 255 : 0);
  write_png(path, raw);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  RawPng raw = read_png(path);
  if (raw.channels != 1) fail(ErrorKind::Io, "mask PNG must be grayscale: " + path.string());
  BinaryMask mask(raw.height, raw.width);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = raw.samples[i] ? 1 : 0;
  return mask;
}

std::filesystem::path label_sidecar_path(const std::filesystem::path& png) {
  auto side = png;
  side.replace_extension(".json");
  return side;
}

void save_label_map(const std::filesystem::path& path, const LabelMap& labels) {
  RawPng raw{labels.height(), labels.width(), 1, 16, {}};
  raw.samples.reserve(labels.ids().size());
  for (auto id : labels.ids()) {
    if (id > 0xffff) fail(ErrorKind::Io, "segment id exceeds 16-bit range");
    raw.samples.push_back(static_cast<std::uint16_t>(id));
  }
  write_png(path, raw);

  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [seg, cls] : labels.class_table()) classes[std::to_string(seg)] = cls;
  std::ofstream out(label_sidecar_path(path));
  if (!out) fail(ErrorKind::Io, "cannot write label sidecar for " + path.string());
  out << nlohmann::json{{"classes", classes}}.dump(2) << "\n";
}

LabelMap load_label_map(const std::filesystem::path& path) {
  RawPng raw = read_png(path);
  if (raw.channels != 1) fail(ErrorKind::Io, "label PNG must be grayscale: " + path.string());
  LabelMap labels(raw.height, raw.width);
  auto ids = labels.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = raw.samples[i];

  std::ifstream in(label_sidecar_path(path));
  if (!in) fail(ErrorKind::Io, "missing label sidecar for " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    for (const auto& [seg, cls] : doc.at("classes").items()) {
      labels.class_table()[static_cast<std::uint32_t>(std::stoul(seg))] = cls.get<int>();
    }
  } catch (const std::exception& e) {
    fail(ErrorKind::Io, "malformed label sidecar: " + std::string(e.what()));
  }
  return labels;
}

}  // namespace maskopt::io
