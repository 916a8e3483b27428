#pragma once

#include <filesystem>

#include "maskopt/image.hpp"

namespace maskopt::io {

enum class BitDepth { Eight = 8, Sixteen = 16 };

// 1-channel images become grayscale PNGs, 3-channel images RGB PNGs.
// Values are quantized to round(v * (2^depth - 1)).
void save_image(const std::filesystem::path& path, const Image& img,
                BitDepth depth = BitDepth::Eight);
// Gray, gray+alpha, RGB and RGBA inputs are accepted; alpha is dropped.
Image load_image(const std::filesystem::path& path);

// 8-bit grayscale, {0,255}.
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);
// Any nonzero gray value loads as 1.
BinaryMask load_mask(const std::filesystem::path& path);

// 16-bit grayscale PNG of segment ids plus a sidecar JSON
// ({"classes": {"<segment>": <class>, ...}}) at path with extension ".json".
void save_label_map(const std::filesystem::path& path, const LabelMap& labels);
LabelMap load_label_map(const std::filesystem::path& path);

std::filesystem::path label_sidecar_path(const std::filesystem::path& png);

}  // namespace maskopt::io
