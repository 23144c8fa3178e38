#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lgd/tensor.hpp"

namespace lgd {

enum class Split { train, test };

std::string to_string(Split split);
Split parse_split(const std::string& s);

struct ManifestEntry {
  std::string he;
  std::string ihc;
  std::string density;
  std::string mask;
  int label = 0;
  Split split = Split::train;
};

// Paths in entries are relative to `root` (the manifest's directory).
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;

  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
  std::array<int, 4> class_counts(Split split) const;
};

inline constexpr const char* kManifestHeader = "he,ihc,density,mask,label,split";

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

// One split held in memory as batched tensors.
struct SplitData {
  Tensor he;       // [N,3,H,W] in [0,1]
  Tensor ihc;      // [N,3,H,W]
  Tensor density;  // [N,1,g,g]
  Tensor mask;     // [N,1,g,g]
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

SplitData load_split(const DatasetManifest& manifest, Split split);

// Gathers rows `indices` of a [N,...] tensor into a new batch tensor.
Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& indices);

}  // namespace lgd
