#include "lgd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lgd/errors.hpp"
#include "lgd/rng.hpp"
#include "lgd/stain.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Nucleus {
  Point center;
  double radius;
  double intensity;
  double ring_start;
};

// Low-frequency texture in [0,1] built from a few random plane waves.
class SmoothField {
 public:
  SmoothField(SplitMix64& rng, int size) : size_(size) {
    for (auto& w : waves_) {
      w = {rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(0.0, kTwoPi)};
    }
  }
  double operator()(double x, double y) const {
    double acc = 0.0;
    for (const auto& w : waves_) acc += std::cos(kTwoPi * (w[0] * x + w[1] * y) / size_ + w[2]);
    return 0.5 + acc / (2.0 * waves_.size());
  }

 private:
  int size_;
  std::array<std::array<double, 3>, 3> waves_{};
};

std::vector<Point> place_centers(SplitMix64& rng, int count, int size) {
  const double margin = 3.0;
  const double min_sep = 4.5;
  std::vector<Point> centers;
  for (int i = 0; i < count; ++i) {
    Point p{};
    for (int attempt = 0; attempt < 200; ++attempt) {
      p = {rng.uniform(margin, size - margin), rng.uniform(margin, size - margin)};
      const bool clear = std::all_of(centers.begin(), centers.end(), [&](const Point& q) {
        return std::hypot(p.x - q.x, p.y - q.y) >= min_sep;
      });
      if (clear) break;
    }
    centers.push_back(p);
  }
  return centers;
}

// Soft disc: 1 inside the radius, Gaussian falloff outside.
double nucleus_profile(double dist, double radius) {
  if (dist <= radius) return 1.0;
  const double t = (dist - radius) / 0.6;
  return std::exp(-t * t);
}

bool on_ring(const Nucleus& n, double x, double y, double completeness) {
  if (completeness <= 0.0) return false;
  const double dx = x - n.center.x;
  const double dy = y - n.center.y;
  const double d = std::hypot(dx, dy);
  if (d < n.radius + 0.6 || d > n.radius + 1.9) return false;
  double angle = std::atan2(dy, dx) - n.ring_start;
  angle = std::fmod(angle, kTwoPi);
  if (angle < 0) angle += kTwoPi;
  return angle < completeness * kTwoPi;
}

}  // namespace

Her2Score::Her2Score(int value) : value_(value) {
  if (value < 0 || value > 3) throw InvalidLabel("HER2 score must be in 0..3, got " + std::to_string(value));
}

std::pair<int, int> nuclei_range(Her2Score label) {
  static constexpr std::array<std::pair<int, int>, 4> kRanges{{{3, 5}, {5, 8}, {8, 12}, {12, 16}}};
  return kRanges[label.value()];
}

double ring_completeness(Her2Score label) {
  static constexpr std::array<double, 4> kCompleteness{0.0, 0.35, 0.70, 1.0};
  return kCompleteness[label.value()];
}

double ring_intensity(Her2Score label) {
  static constexpr std::array<double, 4> kIntensity{0.0, 0.3, 0.6, 0.9};
  return kIntensity[label.value()];
}

SamplePair generate_pair(Her2Score label, std::uint64_t seed, int size) {
  if (size < 16) throw InvalidArgument("generate_pair: size must be at least 16");
  SplitMix64 rng(mix_seed(seed, 0x4845520000ULL + static_cast<std::uint64_t>(label.value())));

  const auto [lo, hi] = nuclei_range(label);
  const int count = rng.uniform_int(lo, hi);
  const auto centers = place_centers(rng, count, size);
  std::vector<Nucleus> nuclei;
  for (const auto& c : centers) {
    nuclei.push_back({c, rng.uniform(1.4, 2.2), rng.uniform(0.7, 1.1), rng.uniform(0.0, kTwoPi)});
  }

  const double completeness = ring_completeness(label);
  const double intensity = ring_intensity(label);
  const double cue = 0.05 * label.value();
  const double eosin_base = rng.uniform(0.25, 0.45);
  const SmoothField eosin_field(rng, size);
  const SmoothField cue_field(rng, size);

  stain::ChannelImage he_conc{size, size, {}};
  stain::ChannelImage ihc_conc{size, size, {}};
  he_conc.pixels.resize(static_cast<std::size_t>(size) * size);
  ihc_conc.pixels.resize(he_conc.pixels.size());
  MembraneMask ring_mask(size, size);

  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      double hema = 0.0;
      bool ring = false;
      for (const auto& n : nuclei) {
        hema += n.intensity * nucleus_profile(std::hypot(px - n.center.x, py - n.center.y), n.radius);
        ring = ring || on_ring(n, px, py, completeness);
      }
      hema = std::min(hema, 1.3);
      const std::size_t i = static_cast<std::size_t>(y) * size + x;

      // H&E: eosin ground, violet nuclei, faint brown where membranes sit.
      stain::Vec3 he{0.03 + hema, eosin_base + 0.12 * (eosin_field(px, py) - 0.5), 0.0};
      if (ring) he[stain::kDab] = cue * (0.5 + 0.5 * cue_field(px, py));
      for (auto& v : he) v = std::max(0.0, v + 0.02 * rng.normal());
      he_conc.pixels[i] = he;

      // IHC: pale counterstain, lighter nuclei, DAB membrane rings.
      stain::Vec3 ihc{0.04 + 0.7 * hema, 0.02, 0.0};
      if (ring && intensity > 0.0) {
        ihc[stain::kDab] = intensity * (0.9 + 0.2 * rng.uniform());
        ring_mask.values[i] = 1.0;
      }
      ihc[stain::kHematoxylin] = std::max(0.0, ihc[stain::kHematoxylin] + 0.01 * rng.normal());
      ihc_conc.pixels[i] = ihc;
    }
  }

  const auto hed = stain::StainMatrix::hed();
  return SamplePair{stain::render(he_conc, hed), stain::render(ihc_conc, hed), label, centers, std::move(ring_mask),
                    seed};
}

std::pair<DensityMap, MembraneMask> compute_targets(const RgbPatch& he, const RgbPatch& ihc,
                                                    const TargetOptions& options) {
  DensityMap density = options.nuclei_source == NucleiSource::he
                           ? stain::nuclei_density(he, options.sigma, options.grid, stain::StainMatrix::he())
                           : stain::nuclei_density(ihc, options.sigma, options.grid, stain::StainMatrix::hed());
  return {std::move(density), stain::membrane_mask(ihc, options.grid)};
}

std::uint64_t sample_seed(std::uint64_t dataset_seed, Split split, std::size_t index) {
  const std::uint64_t base = split == Split::train ? 0 : (1ULL << 40);
  return mix_seed(dataset_seed, base + index);
}

DatasetManifest build_dataset(int n_train, int n_test, std::uint64_t seed, const std::filesystem::path& out_dir,
                              const BuildOptions& options) {
  if (n_train < 4 || n_test < 4) throw InvalidArgument("build_dataset: need at least 4 samples per split");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  for (const char* sub : {"he", "ihc", "density", "mask"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError((out_dir / sub).string(), "cannot create directory: " + ec.message());
  }

  DatasetManifest manifest;
  manifest.root = out_dir;
  manifest.seed = seed;
  for (Split split : {Split::train, Split::test}) {
    const int n = split == Split::train ? n_train : n_test;
    for (int i = 0; i < n; ++i) {
      const Her2Score label(i % 4);
      const SamplePair pair = generate_pair(label, sample_seed(seed, split, static_cast<std::size_t>(i)), options.size);
      char stem[32];
      std::snprintf(stem, sizeof stem, "%s_%05d", to_string(split).c_str(), i);
      ManifestEntry e{std::string("he/") + stem + ".ppm", std::string("ihc/") + stem + ".ppm",
                      std::string("density/") + stem + ".lgdt", std::string("mask/") + stem + ".lgdt", label.value(),
                      split};
      write_ppm(manifest.resolve(e.he), pair.he);
      write_ppm(manifest.resolve(e.ihc), pair.ihc);
      const auto [density, mask] = compute_targets(pair.he, pair.ihc, options.targets);
      io::write_lgdt(manifest.resolve(e.density), plane_to_tensor(density));
      io::write_lgdt(manifest.resolve(e.mask), plane_to_tensor(mask));
      manifest.entries.push_back(std::move(e));
    }
  }
  write_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

void precompute_targets(const DatasetManifest& manifest, const TargetOptions& options) {
  for (const auto& e : manifest.entries) {
    const RgbPatch he = read_ppm(manifest.resolve(e.he));
    const RgbPatch ihc = read_ppm(manifest.resolve(e.ihc));
    const auto [density, mask] = compute_targets(he, ihc, options);
    io::write_lgdt(manifest.resolve(e.density), plane_to_tensor(density));
    io::write_lgdt(manifest.resolve(e.mask), plane_to_tensor(mask));
  }
}

}  // namespace lgd::synth
