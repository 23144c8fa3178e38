#include "lgd/dataset.hpp"

#include <fstream>
#include <sstream>

#include "lgd/errors.hpp"
#include "lgd/image.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::filesystem::path seed_file(const std::filesystem::path& manifest_path) {
  return manifest_path.parent_path() / "dataset.seed";
}

void append_rows(std::vector<float>& dst, const Tensor& t) { dst.insert(dst.end(), t.data().begin(), t.data().end()); }

}  // namespace

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw InvalidArgument("unknown split '" + s + "'");
}

std::array<int, 4> DatasetManifest::class_counts(Split split) const {
  std::array<int, 4> counts{};
  for (const auto& e : entries) {
    if (e.split == split) ++counts[e.label];
  }
  return counts;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ostringstream os;
  os << kManifestHeader << '\n';
  for (const auto& e : manifest.entries) {
    os << e.he << ',' << e.ihc << ',' << e.density << ',' << e.mask << ',' << e.label << ',' << to_string(e.split)
       << '\n';
  }
  io::write_text(path, os.str());
  io::write_text(seed_file(path), std::to_string(manifest.seed) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw IoError(path.string(), std::string("manifest header must be '") + kManifestHeader + "'");
  }
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 6) throw IoError(path.string(), "row " + std::to_string(row) + " does not have 6 fields");
    ManifestEntry e{f[0], f[1], f[2], f[3], 0, Split::train};
    try {
      e.label = std::stoi(f[4]);
      e.split = parse_split(f[5]);
    } catch (const std::exception&) {
      throw IoError(path.string(), "row " + std::to_string(row) + " is malformed");
    }
    if (e.label < 0 || e.label > 3) throw IoError(path.string(), "row " + std::to_string(row) + " has label outside 0..3");
    m.entries.push_back(std::move(e));
  }
  std::ifstream seed_in(seed_file(path));
  if (seed_in) seed_in >> m.seed;
  return m;
}

SplitData load_split(const DatasetManifest& manifest, Split split) {
  std::vector<float> he, ihc, density, mask;
  std::vector<int> labels;
  std::size_t h = 0, w = 0, g = 0;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    const RgbPatch he_patch = read_ppm(manifest.resolve(e.he));
    const RgbPatch ihc_patch = read_ppm(manifest.resolve(e.ihc));
    if (he_patch.width != ihc_patch.width || he_patch.height != ihc_patch.height) {
      throw IoError(manifest.resolve(e.ihc).string(), "IHC patch is not registered with its H&E patch");
    }
    const Tensor k = io::read_lgdt(manifest.resolve(e.density));
    const Tensor m = io::read_lgdt(manifest.resolve(e.mask));
    if (labels.empty()) {
      h = static_cast<std::size_t>(he_patch.height);
      w = static_cast<std::size_t>(he_patch.width);
      g = k.shape().back();
    }
    if (static_cast<std::size_t>(he_patch.height) != h || static_cast<std::size_t>(he_patch.width) != w ||
        k.numel() != g * g || m.numel() != g * g) {
      throw IoError(manifest.resolve(e.he).string(), "sample dimensions differ from the rest of the split");
    }
    const auto a = patch_to_chw(he_patch);
    const auto b = patch_to_chw(ihc_patch);
    he.insert(he.end(), a.begin(), a.end());
    ihc.insert(ihc.end(), b.begin(), b.end());
    append_rows(density, k);
    append_rows(mask, m);
    labels.push_back(e.label);
  }
  if (labels.empty()) throw IoError(manifest.root.string(), "split '" + to_string(split) + "' is empty");
  const std::size_t n = labels.size();
  return SplitData{Tensor({n, 3, h, w}, std::move(he)), Tensor({n, 3, h, w}, std::move(ihc)),
                   Tensor({n, 1, g, g}, std::move(density)), Tensor({n, 1, g, g}, std::move(mask)),
                   std::move(labels)};
}

Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& indices) {
  const std::size_t row = t.numel() / t.dim(0);
  std::vector<float> out(indices.size() * row);
  auto src = t.data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= t.dim(0)) throw InvalidArgument("gather_rows: index out of range");
    std::copy_n(src.begin() + static_cast<long>(indices[i] * row), row, out.begin() + static_cast<long>(i * row));
  }
  Shape shape = t.shape();
  shape[0] = indices.size();
  return Tensor(std::move(shape), std::move(out));
}

}  // namespace lgd
