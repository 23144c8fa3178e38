#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "lgd/image.hpp"

namespace lgd::stain {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Three-channel per-pixel image: optical densities or stain concentrations.
struct ChannelImage {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;

  Plane channel(int index) const;
};

// Rows are unit stain vectors in optical-density space: od = c * rows.
class StainMatrix {
 public:
  // Normalizes each row; throws InvalidStainMatrix when |det| <= 1e-6.
  explicit StainMatrix(const Mat3& rows);

  // Ruifrok-Johnston hematoxylin / eosin / DAB.
  static StainMatrix hed();
  // Hematoxylin / eosin with the normalized cross product as third row.
  static StainMatrix he();

  const Mat3& rows() const { return rows_; }
  const Mat3& inverse() const { return inverse_; }

  Vec3 to_concentrations(const Vec3& od) const;
  Vec3 to_od(const Vec3& concentrations) const;

 private:
  Mat3 rows_;
  Mat3 inverse_;
};

inline constexpr int kHematoxylin = 0;
inline constexpr int kEosin = 1;
inline constexpr int kDab = 2;

// OD_c = -log10((I_c + 1) / 256).
Vec3 pixel_to_od(std::uint8_t r, std::uint8_t g, std::uint8_t b);
ChannelImage rgb_to_od(const RgbPatch& patch);

// Per-pixel od * inverse, clamped at 0 from below.
ChannelImage deconvolve(const ChannelImage& od, const StainMatrix& matrix);

// Inverse of the optical-density transform, rounded and clamped to 8 bits.
RgbPatch render(const ChannelImage& concentrations, const StainMatrix& matrix);

// Normalized 1-D kernel with radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

// Half-sample symmetric reflection of an out-of-range index into [0, n).
int reflect_index(int i, int n);

// Separable Gaussian blur with reflect padding.
Plane gaussian_filter(const Plane& map, double sigma);

// Block pooling of a plane down to grid x grid cells.
Plane mean_pool(const Plane& map, int grid);
Plane max_pool(const Plane& map, int grid);

// Hematoxylin channel of `patch` (via `matrix`), blurred with `sigma`, then
// mean-pooled to grid x grid.
DensityMap nuclei_density(const RgbPatch& patch, double sigma, int grid, const StainMatrix& matrix = StainMatrix::he());

using Histogram = std::array<std::uint64_t, 256>;

// Otsu's threshold over a 256-bin histogram. The returned bin t splits the
// histogram into {< t} and {>= t}; it maximizes between-class variance with
// ties going to the lower bin. With all mass in one bin, that bin is
// returned and the caller treats the channel as degenerate.
int otsu_threshold(const Histogram& histogram);

// Number of occupied bins; < 2 means the channel is single-valued.
int occupied_bins(const Histogram& histogram);

struct MaskOptions {
  // DAB concentrations below this never count as membrane, and a channel
  // whose maximum stays below it yields an empty mask.
  double min_signal = 0.05;
};

// DAB channel binned over [0, max] into 256 bins, thresholded with Otsu,
// then max-pooled to grid x grid.
MembraneMask membrane_mask(const RgbPatch& ihc, int grid, MaskOptions options = {});

// Full-resolution DAB concentration channel of an IHC patch.
Plane dab_channel(const RgbPatch& ihc);

}  // namespace lgd::stain
