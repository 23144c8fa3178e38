#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lgd/tensor.hpp"

// "LGDT" raw tensor files: magic `LGDT`, u32 LE rank, rank x u32 LE dims,
// then row-major f32 LE values.
namespace lgd::io {

std::vector<unsigned char> encode_lgdt(const Tensor& t);
// Decodes one tensor starting at `offset`; advances `offset` past it.
Tensor decode_lgdt(const std::vector<unsigned char>& bytes, std::size_t& offset, const std::string& source = "<buffer>");

void write_lgdt(const std::filesystem::path& path, const Tensor& t);
Tensor read_lgdt(const std::filesystem::path& path);

std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lgd::io
