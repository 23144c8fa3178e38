#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lgd/tensor.hpp"

namespace lgd {

// 8-bit interleaved RGB image, row-major.
struct RgbPatch {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbPatch() = default;
  RgbPatch(int w, int h);

  std::uint8_t& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  bool operator==(const RgbPatch&) const = default;
};

// Single-channel real-valued image, row-major. Density maps and masks.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double total() const;
  bool operator==(const Plane&) const = default;
};

using DensityMap = Plane;
using MembraneMask = Plane;

// Binary PPM (P6, maxval 255).
void write_ppm(const std::filesystem::path& path, const RgbPatch& patch);
RgbPatch read_ppm(const std::filesystem::path& path);

// [1,1,H,W] tensor of the plane's values.
Tensor plane_to_tensor(const Plane& plane);
Plane tensor_to_plane(const Tensor& t);

// Channel-first float image [3,H,W] scaled to [0,1].
std::vector<float> patch_to_chw(const RgbPatch& patch);

}  // namespace lgd
