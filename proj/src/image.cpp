#include "maskopt/image.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace maskopt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputShape: return "input-shape error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateMask: return "degenerate-mask error";
    case ErrorKind::Placement: return "placement error";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::NoOverlap: return "no-overlap error";
    case ErrorKind::Aggregation: return "aggregation error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Sweep: return "sweep error";
  }
  return "error";
}

void require_same_extents(Extents a, Extents b, const char* what) {
  if (a != b) {
    fail(ErrorKind::InputShape,
         std::string(what) + ": extent mismatch (" + std::to_string(a.height) +
             "x" + std::to_string(a.width) + " vs " + std::to_string(b.height) +
             "x" + std::to_string(b.width) + ")");
  }
}

Image::Image(int height, int width, int channels, float value)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || (channels != 1 && channels != 3)) {
    fail(ErrorKind::InputShape, "Image: invalid shape");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, value);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height < 0 || width < 0 || (channels != 1 && channels != 3) ||
      data_.size() != static_cast<std::size_t>(height) * width * channels) {
    fail(ErrorKind::InputShape, "Image: data length does not match shape");
  }
}

BinaryMask::BinaryMask(int height, int width, bool value)
    : height_(height), width_(width) {
  if (height < 0 || width < 0) fail(ErrorKind::InputShape, "BinaryMask: invalid shape");
  data_.assign(static_cast<std::size_t>(height) * width, value ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

BinaryMask BinaryMask::complement() const {
  BinaryMask out(height_, width_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] ? 0 : 1;
  return out;
}

LabelMap::LabelMap(int height, int width, std::uint32_t fill)
    : height_(height), width_(width) {
  if (height < 0 || width < 0) fail(ErrorKind::InputShape, "LabelMap: invalid shape");
  ids_.assign(static_cast<std::size_t>(height) * width, fill);
}

int LabelMap::class_of(std::uint32_t segment) const {
  auto it = class_of_.find(segment);
  if (it == class_of_.end()) {
    fail(ErrorKind::InputShape, "LabelMap: segment " + std::to_string(segment) +
                                    " has no class entry");
  }
  return it->second;
}

std::uint32_t LabelMap::segment_count() const {
  if (ids_.empty()) return 0;
  return *std::max_element(ids_.begin(), ids_.end()) + 1;
}

BinaryMask LabelMap::segment_mask(std::uint32_t segment) const {
  BinaryMask out(height_, width_);
  for (std::size_t i = 0; i < ids_.size(); ++i) out[i] = ids_[i] == segment ? 1 : 0;
  return out;
}

void LabelMap::validate() const {
  std::set<std::uint32_t> seen(ids_.begin(), ids_.end());
  std::uint32_t expected = 0;
  for (auto id : seen) {
    if (id != expected++) {
      fail(ErrorKind::InputShape, "LabelMap: segment ids are not contiguous from 0");
    }
    if (!class_of_.contains(id)) {
      fail(ErrorKind::InputShape,
           "LabelMap: segment " + std::to_string(id) + " has no class entry");
    }
  }
}

Image to_grayscale(const Image& img) {
  if (img.channels() != 3) {
    fail(ErrorKind::InputShape, "to_grayscale: expected 3 channels, got " +
                                    std::to_string(img.channels()));
  }
  Image out(img.height(), img.width(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double v = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

Image apply_mask(const Image& img, const BinaryMask& mask, float fill) {
  require_same_extents(img.extents(), mask.extents(), "apply_mask");
  Image out = img;
  auto dst = out.data();
  const int c = img.channels();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int k = 0; k < c; ++k) dst[p * c + k] = fill;
  }
  return out;
}

double mask_ratio(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  return 100.0 * static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

}  // namespace maskopt
