#include "lgd/stain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgd/errors.hpp"

namespace lgd::stain {
namespace {

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n <= 0.0) throw InvalidStainMatrix("stain vector has zero norm");
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 row_times(const Vec3& v, const Mat3& m) {
  Vec3 out{};
  for (int j = 0; j < 3; ++j) out[j] = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
  return out;
}

void check_grid(int width, int height, int grid) {
  if (grid <= 0 || width % grid != 0 || height % grid != 0) {
    throw InvalidArgument("grid " + std::to_string(grid) + " does not divide " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

constexpr Vec3 kHematoxylinVec{0.650, 0.704, 0.286};
constexpr Vec3 kEosinVec{0.072, 0.990, 0.105};
constexpr Vec3 kDabVec{0.268, 0.570, 0.776};

}  // namespace

Plane ChannelImage::channel(int index) const {
  Plane p(width, height);
  for (std::size_t i = 0; i < pixels.size(); ++i) p.values[i] = pixels[i][index];
  return p;
}

StainMatrix::StainMatrix(const Mat3& rows) {
  for (int i = 0; i < 3; ++i) rows_[i] = normalized(rows[i]);
  const double det = det3(rows_);
  if (!(std::abs(det) > 1e-6)) throw InvalidStainMatrix("stain matrix is singular (|det| <= 1e-6)");
  const Mat3& m = rows_;
  inverse_[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inverse_[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inverse_[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inverse_[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inverse_[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inverse_[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inverse_[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inverse_[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inverse_[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
}

StainMatrix StainMatrix::hed() { return StainMatrix(Mat3{kHematoxylinVec, kEosinVec, kDabVec}); }

StainMatrix StainMatrix::he() {
  const Vec3 h = normalized(kHematoxylinVec);
  const Vec3 e = normalized(kEosinVec);
  const Vec3 r{h[1] * e[2] - h[2] * e[1], h[2] * e[0] - h[0] * e[2], h[0] * e[1] - h[1] * e[0]};
  return StainMatrix(Mat3{h, e, normalized(r)});
}

Vec3 StainMatrix::to_concentrations(const Vec3& od) const { return row_times(od, inverse_); }

Vec3 StainMatrix::to_od(const Vec3& concentrations) const { return row_times(concentrations, rows_); }

Vec3 pixel_to_od(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  auto od = [](std::uint8_t v) { return -std::log10((static_cast<double>(v) + 1.0) / 256.0); };
  return {od(r), od(g), od(b)};
}

ChannelImage rgb_to_od(const RgbPatch& patch) {
  ChannelImage out{patch.width, patch.height, {}};
  out.pixels.resize(static_cast<std::size_t>(patch.width) * patch.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = pixel_to_od(patch.pixels[3 * i], patch.pixels[3 * i + 1], patch.pixels[3 * i + 2]);
  }
  return out;
}

ChannelImage deconvolve(const ChannelImage& od, const StainMatrix& matrix) {
  ChannelImage out{od.width, od.height, {}};
  out.pixels.resize(od.pixels.size());
  for (std::size_t i = 0; i < od.pixels.size(); ++i) {
    Vec3 c = matrix.to_concentrations(od.pixels[i]);
    for (auto& v : c) v = std::max(v, 0.0);
    out.pixels[i] = c;
  }
  return out;
}

RgbPatch render(const ChannelImage& concentrations, const StainMatrix& matrix) {
  RgbPatch patch(concentrations.width, concentrations.height);
  for (std::size_t i = 0; i < concentrations.pixels.size(); ++i) {
    const Vec3 od = matrix.to_od(concentrations.pixels[i]);
    for (int c = 0; c < 3; ++c) {
      const double intensity = 256.0 * std::pow(10.0, -od[c]) - 1.0;
      patch.pixels[3 * i + c] = static_cast<std::uint8_t>(std::clamp(std::lround(intensity), 0L, 255L));
    }
  }
  return patch;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += k[i + radius];
  }
  for (auto& v : k) v /= total;
  return k;
}

int reflect_index(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

Plane gaussian_filter(const Plane& map, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  Plane tmp(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) acc += k[d + r] * map.at(reflect_index(x + d, map.width), y);
      tmp.at(x, y) = acc;
    }
  }
  Plane out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) acc += k[d + r] * tmp.at(x, reflect_index(y + d, map.height));
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane mean_pool(const Plane& map, int grid) {
  check_grid(map.width, map.height, grid);
  const int bw = map.width / grid;
  const int bh = map.height / grid;
  Plane out(grid, grid);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) out.at(x / bw, y / bh) += map.at(x, y);
  }
  for (auto& v : out.values) v /= static_cast<double>(bw * bh);
  return out;
}

Plane max_pool(const Plane& map, int grid) {
  check_grid(map.width, map.height, grid);
  const int bw = map.width / grid;
  const int bh = map.height / grid;
  Plane out(grid, grid, -std::numeric_limits<double>::infinity());
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) out.at(x / bw, y / bh) = std::max(out.at(x / bw, y / bh), map.at(x, y));
  }
  return out;
}

DensityMap nuclei_density(const RgbPatch& patch, double sigma, int grid, const StainMatrix& matrix) {
  if (!(sigma > 0.0)) throw InvalidArgument("nuclei_density: sigma must be positive");
  check_grid(patch.width, patch.height, grid);
  const Plane hematoxylin = deconvolve(rgb_to_od(patch), matrix).channel(kHematoxylin);
  return mean_pool(gaussian_filter(hematoxylin, sigma), grid);
}

int occupied_bins(const Histogram& histogram) {
  return static_cast<int>(std::count_if(histogram.begin(), histogram.end(), [](auto c) { return c > 0; }));
}

int otsu_threshold(const Histogram& histogram) {
  std::uint64_t total = 0;
  std::uint64_t weighted = 0;
  for (int i = 0; i < 256; ++i) {
    total += histogram[i];
    weighted += static_cast<std::uint64_t>(i) * histogram[i];
  }
  if (total == 0) throw InvalidArgument("otsu_threshold: empty histogram");
  if (occupied_bins(histogram) < 2) {
    return static_cast<int>(std::find_if(histogram.begin(), histogram.end(), [](auto c) { return c > 0; }) -
                            histogram.begin());
  }
  int best_t = 0;
  double best = -1.0;
  std::uint64_t w0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 1; t < 256; ++t) {
    w0 += histogram[t - 1];
    s0 += static_cast<std::uint64_t>(t - 1) * histogram[t - 1];
    const std::uint64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const std::uint64_t s1 = weighted - s0;
    // w0*w1*(mu0-mu1)^2 up to the constant 1/total^2, from exact integers.
    const __int128 d = static_cast<__int128>(s0) * w1 - static_cast<__int128>(s1) * w0;
    const double dd = static_cast<double>(d);
    const double score = dd * dd / (static_cast<double>(w0) * static_cast<double>(w1));
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

Plane dab_channel(const RgbPatch& ihc) { return deconvolve(rgb_to_od(ihc), StainMatrix::hed()).channel(kDab); }

MembraneMask membrane_mask(const RgbPatch& ihc, int grid, MaskOptions options) {
  check_grid(ihc.width, ihc.height, grid);
  const Plane dab = dab_channel(ihc);
  const double top = *std::max_element(dab.values.begin(), dab.values.end());
  Plane full(ihc.width, ihc.height, 0.0);
  if (top > options.min_signal) {
    auto bin_of = [top](double v) { return std::min(255, static_cast<int>(std::floor(v / top * 256.0))); };
    Histogram hist{};
    for (double v : dab.values) ++hist[bin_of(v)];
    if (occupied_bins(hist) >= 2) {
      const int t = otsu_threshold(hist);
      for (std::size_t i = 0; i < dab.values.size(); ++i) {
        const double v = dab.values[i];
        full.values[i] = (bin_of(v) >= t && v >= options.min_signal) ? 1.0 : 0.0;
      }
    }
  }
  return max_pool(full, grid);
}

}  // namespace lgd::stain
