#include "lgd/checkpoint.hpp"

#include <sstream>

#include "lgd/errors.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd {

std::filesystem::path checkpoint_index_path(const std::filesystem::path& blob) {
  return std::filesystem::path(blob.string() + ".index.csv");
}

void save_checkpoint(const std::filesystem::path& blob, const NamedTensors& tensors) {
  std::vector<unsigned char> bytes;
  std::ostringstream index;
  index << "name,offset,length\n";
  for (const auto& [name, t] : tensors) {
    if (name.find(',') != std::string::npos) throw InvalidArgument("parameter name contains a comma: " + name);
    auto enc = io::encode_lgdt(t);
    index << name << ',' << bytes.size() << ',' << enc.size() << '\n';
    bytes.insert(bytes.end(), enc.begin(), enc.end());
  }
  io::write_file(blob, bytes);
  io::write_text(checkpoint_index_path(blob), index.str());
}

NamedTensors load_checkpoint(const std::filesystem::path& blob) {
  const auto index_path = checkpoint_index_path(blob);
  auto bytes = io::read_file(blob);
  auto index_bytes = io::read_file(index_path);
  std::istringstream index(std::string(index_bytes.begin(), index_bytes.end()));
  std::string line;
  if (!std::getline(index, line) || line != "name,offset,length") {
    throw IoError(index_path.string(), "bad checkpoint index header");
  }
  NamedTensors out;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw IoError(index_path.string(), "malformed index row: " + line);
    }
    std::size_t offset = 0;
    std::size_t length = 0;
    try {
      offset = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
      length = std::stoull(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw IoError(index_path.string(), "malformed index row: " + line);
    }
    std::size_t cursor = offset;
    Tensor t = io::decode_lgdt(bytes, cursor, blob.string());
    if (cursor - offset != length) throw IoError(blob.string(), "index length mismatch for " + line.substr(0, c1));
    out.emplace(line.substr(0, c1), std::move(t));
  }
  return out;
}

NamedTensors strip_prefixes(const NamedTensors& tensors, const std::vector<std::string>& prefixes) {
  NamedTensors out;
  for (const auto& [name, t] : tensors) {
    bool drop = false;
    for (const auto& p : prefixes) drop = drop || name.starts_with(p);
    if (!drop) out.emplace(name, t);
  }
  return out;
}

}  // namespace lgd
