#include "lgd/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lgd/errors.hpp"

namespace lgd::io {
namespace {

constexpr char kMagic[4] = {'L', 'G', 'D', 'T'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t& off, const std::string& source) {
  if (off + 4 > in.size()) throw IoError(source, "truncated LGDT stream");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  off += 4;
  return v;
}

}  // namespace

std::vector<unsigned char> encode_lgdt(const Tensor& t) {
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(8 + 4 * t.rank() + 4 * t.numel());
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_lgdt(const std::vector<unsigned char>& bytes, std::size_t& offset, const std::string& source) {
  if (offset + 4 > bytes.size() || std::memcmp(bytes.data() + offset, kMagic, 4) != 0) {
    throw IoError(source, "missing LGDT magic");
  }
  offset += 4;
  const std::uint32_t rank = get_u32(bytes, offset, source);
  if (rank > 16) throw IoError(source, "implausible LGDT rank " + std::to_string(rank));
  Shape shape(rank);
  std::size_t count = 1;
  for (auto& d : shape) {
    d = get_u32(bytes, offset, source);
    count *= d;
  }
  if (count > (bytes.size() - offset) / 4) throw IoError(source, "truncated LGDT payload");
  std::vector<float> data(count);
  for (auto& v : data) v = std::bit_cast<float>(get_u32(bytes, offset, source));
  return Tensor(std::move(shape), std::move(data));
}

void write_lgdt(const std::filesystem::path& path, const Tensor& t) { write_file(path, encode_lgdt(t)); }

Tensor read_lgdt(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  std::size_t off = 0;
  Tensor t = decode_lgdt(bytes, off, path.string());
  if (off != bytes.size()) throw IoError(path.string(), "trailing bytes after LGDT tensor");
  return t;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<unsigned char>(text.begin(), text.end()));
}

}  // namespace lgd::io
