#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lgd/losses.hpp"
#include "lgd/variant.hpp"

namespace lgd {

// One training run. Text form is `key = value` per line with keys equal to
// the field names; the loss weights use lambda_d, lambda_n and lambda_m.
struct RunConfig {
  Variant variant = Variant::F;
  int epochs = 50;
  int batch_size = 32;
  double base_lr = 1e-4;
  losses::LossWeights weights;
  std::uint64_t seed = 42;
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> teacher_ckpt;
  std::filesystem::path out_dir = "runs";
  losses::CosineMode cosine_mode = losses::CosineMode::pooled;
  bool joint_teacher = false;

  // Throws InvalidArgument on nonpositive numbers or an empty dataset path.
  void validate() const;

  // `<out_dir>/<variant>-<seed>`
  std::filesystem::path run_dir() const;
};

// Parses config text. Unknown keys and malformed values throw InvalidArgument.
RunConfig parse_config(const std::string& text);

// Reads a config file, then applies the LGD_SEED environment override.
// Relative dataset and checkpoint paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

std::string format_config(const RunConfig& cfg);

}  // namespace lgd
