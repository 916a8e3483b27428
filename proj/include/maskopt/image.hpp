#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "maskopt/error.hpp"

namespace maskopt {

struct Extents {
  int height = 0;
  int width = 0;

  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  bool operator==(const Extents&) const = default;
};

// H x W x C grid of reals in [0,1], row-major with interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float value = 0.0f);
  Image(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  Extents extents() const { return {height_, width_}; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int row, int col, int ch = 0) {
    return data_[index(row, col, ch)];
  }
  float at(int row, int col, int ch = 0) const {
    return data_[index(row, col, ch)];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// H x W grid of {0,1}.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool value = false);
  BinaryMask(Extents ext, bool value = false)
      : BinaryMask(ext.height, ext.width, value) {}

  int height() const { return height_; }
  int width() const { return width_; }
  Extents extents() const { return {height_, width_}; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t& at(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& operator[](std::size_t i) { return data_[i]; }
  std::uint8_t operator[](std::size_t i) const { return data_[i]; }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  std::size_t count() const;
  bool any() const { return count() > 0; }
  bool all() const { return count() == data_.size(); }
  BinaryMask complement() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

// Per-pixel segment ids plus a segment -> class table.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int height, int width, std::uint32_t fill = 0);

  int height() const { return height_; }
  int width() const { return width_; }
  Extents extents() const { return {height_, width_}; }

  std::uint32_t& at(int row, int col) {
    return ids_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint32_t at(int row, int col) const {
    return ids_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint32_t operator[](std::size_t i) const { return ids_[i]; }

  std::span<std::uint32_t> ids() { return ids_; }
  std::span<const std::uint32_t> ids() const { return ids_; }

  std::map<std::uint32_t, int>& class_table() { return class_of_; }
  const std::map<std::uint32_t, int>& class_table() const { return class_of_; }
  int class_of(std::uint32_t segment) const;

  // Number of segments (max id + 1).
  std::uint32_t segment_count() const;
  BinaryMask segment_mask(std::uint32_t segment) const;

  // Throws unless ids are contiguous from 0 and each has a class entry.
  void validate() const;

  bool operator==(const LabelMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint32_t> ids_;
  std::map<std::uint32_t, int> class_of_;
};

Image to_grayscale(const Image& img);

// Output equals img where mask=0 and `fill` where mask=1.
Image apply_mask(const Image& img, const BinaryMask& mask, float fill = 0.0f);

// Percentage of pixels set, 100*|m|/(H*W).
double mask_ratio(const BinaryMask& mask);

void require_same_extents(Extents a, Extents b, const char* what);

}  // namespace maskopt
