#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lgd/tensor.hpp"

namespace lgd {

using NamedTensors = std::map<std::string, Tensor>;

// A checkpoint is a blob of concatenated LGDT tensors in name order plus a
// sibling CSV index `<path>.index.csv` with rows `name,offset,length`.
std::filesystem::path checkpoint_index_path(const std::filesystem::path& blob);

void save_checkpoint(const std::filesystem::path& blob, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::filesystem::path& blob);

// Drops every entry whose name starts with one of `prefixes`.
NamedTensors strip_prefixes(const NamedTensors& tensors, const std::vector<std::string>& prefixes);

}  // namespace lgd
