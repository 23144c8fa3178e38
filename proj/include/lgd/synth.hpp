#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "lgd/dataset.hpp"
#include "lgd/image.hpp"

namespace lgd::synth {

// HER2 expression level; 0..3 stand for clinical 0, 1+, 2+, 3+.
class Her2Score {
 public:
  explicit Her2Score(int value);
  int value() const { return value_; }
  bool operator==(const Her2Score&) const = default;

 private:
  int value_;
};

struct Point {
  double x;
  double y;
};

struct SamplePair {
  RgbPatch he;
  RgbPatch ihc;
  Her2Score label{0};
  std::vector<Point> nuclei_centers;
  MembraneMask ring_mask;
  std::uint64_t seed = 0;
};

// Inclusive nucleus-count range per class.
std::pair<int, int> nuclei_range(Her2Score label);
double ring_completeness(Her2Score label);
double ring_intensity(Her2Score label);

// Renders a registered H&E/IHC pair. Pure function of its arguments.
SamplePair generate_pair(Her2Score label, std::uint64_t seed, int size = 32);

enum class NucleiSource { he, ihc };

struct TargetOptions {
  double sigma = 2.0;
  int grid = 8;
  NucleiSource nuclei_source = NucleiSource::he;
};

// K_gt and M_gt for one pair, at grid x grid resolution.
std::pair<DensityMap, MembraneMask> compute_targets(const RgbPatch& he, const RgbPatch& ihc, const TargetOptions& options);

// Seed of sample `index` in a split; train and test draw from disjoint streams.
std::uint64_t sample_seed(std::uint64_t dataset_seed, Split split, std::size_t index);

struct BuildOptions {
  int size = 32;
  TargetOptions targets;
};

// Writes PPM pairs, LGDT targets, and manifest.csv under `out_dir`. Labels
// cycle 0,1,2,3 so every split is class-balanced.
DatasetManifest build_dataset(int n_train, int n_test, std::uint64_t seed, const std::filesystem::path& out_dir,
                              const BuildOptions& options = {});

// Recomputes every density/mask file referenced by the manifest.
void precompute_targets(const DatasetManifest& manifest, const TargetOptions& options);

}  // namespace lgd::synth
