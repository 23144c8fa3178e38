#include "lgd/image.hpp"

#include <cctype>
#include <numeric>
#include <string>

#include "lgd/errors.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd {

RgbPatch::RgbPatch(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InvalidArgument("patch dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

Plane::Plane(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InvalidArgument("plane dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

double Plane::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

void write_ppm(const std::filesystem::path& path, const RgbPatch& patch) {
  const std::string header = "P6\n" + std::to_string(patch.width) + " " + std::to_string(patch.height) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), patch.pixels.begin(), patch.pixels.end());
  io::write_file(path, bytes);
}

RgbPatch read_ppm(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> int {
    skip_space();
    long v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && v < 1'000'000) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start) throw IoError(path.string(), "malformed PPM header");
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw IoError(path.string(), "not a binary PPM (P6)");
  pos = 2;
  const int w = read_int();
  const int h = read_int();
  const int maxval = read_int();
  if (w <= 0 || h <= 0) throw IoError(path.string(), "PPM has non-positive dimensions");
  if (maxval != 255) throw IoError(path.string(), "only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw IoError(path.string(), "malformed PPM header");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - pos != need) throw IoError(path.string(), "PPM pixel payload has wrong length");
  RgbPatch patch(w, h);
  std::copy(bytes.begin() + static_cast<long>(pos), bytes.end(), patch.pixels.begin());
  return patch;
}

Tensor plane_to_tensor(const Plane& plane) {
  std::vector<float> data(plane.values.begin(), plane.values.end());
  return Tensor({1, 1, static_cast<std::size_t>(plane.height), static_cast<std::size_t>(plane.width)}, std::move(data));
}

Plane tensor_to_plane(const Tensor& t) {
  if (t.numel() == 0 || t.rank() < 2) throw InvalidShape("tensor_to_plane needs at least 2 axes");
  const auto h = static_cast<int>(t.dim(t.rank() - 2));
  const auto w = static_cast<int>(t.dim(t.rank() - 1));
  if (static_cast<std::size_t>(w) * h != t.numel()) throw InvalidShape("tensor_to_plane expects a single plane");
  Plane p(w, h);
  std::copy(t.data().begin(), t.data().end(), p.values.begin());
  return p;
}

std::vector<float> patch_to_chw(const RgbPatch& patch) {
  const std::size_t hw = static_cast<std::size_t>(patch.width) * patch.height;
  std::vector<float> out(3 * hw);
  for (std::size_t i = 0; i < hw; ++i) {
    for (int c = 0; c < 3; ++c) out[c * hw + i] = patch.pixels[i * 3 + c] / 255.0f;
  }
  return out;
}

}  // namespace lgd
