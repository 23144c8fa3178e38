#include "lgd/config.hpp"

#include <cstdlib>
#include <sstream>

#include "lgd/errors.hpp"
#include "lgd/tensor_io.hpp"

namespace lgd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  is >> out;
  if (!is || !is.eof()) throw InvalidArgument("config key '" + key + "': cannot parse '" + value + "'");
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument("config key '" + key + "': seed must be a nonnegative integer, got '" + value + "'");
  }
  return std::stoull(value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InvalidArgument("config key '" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (epochs <= 0) throw InvalidArgument("epochs must be positive");
  if (batch_size <= 0) throw InvalidArgument("batch_size must be positive");
  if (!(base_lr > 0.0)) throw InvalidArgument("base_lr must be positive");
  weights.validate();
  if (dataset.empty()) throw InvalidArgument("dataset manifest path is required");
}

std::filesystem::path RunConfig::run_dir() const { return out_dir / (to_string(variant) + "-" + std::to_string(seed)); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "variant") cfg.variant = parse_variant(value);
    else if (key == "epochs") cfg.epochs = parse_number<int>(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_number<int>(key, value);
    else if (key == "base_lr") cfg.base_lr = parse_number<double>(key, value);
    else if (key == "lambda_d") cfg.weights.lambda_d = parse_number<double>(key, value);
    else if (key == "lambda_n") cfg.weights.lambda_n = parse_number<double>(key, value);
    else if (key == "lambda_m") cfg.weights.lambda_m = parse_number<double>(key, value);
    else if (key == "seed") cfg.seed = parse_seed(key, value);
    else if (key == "dataset") cfg.dataset = value;
    else if (key == "teacher_ckpt") cfg.teacher_ckpt = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "cosine_mode") {
      if (value == "pooled") cfg.cosine_mode = losses::CosineMode::pooled;
      else if (value == "spatial") cfg.cosine_mode = losses::CosineMode::spatial;
      else throw InvalidArgument("cosine_mode must be pooled or spatial");
    } else if (key == "joint_teacher") cfg.joint_teacher = parse_bool(key, value);
    else throw InvalidArgument("unknown config key '" + key + "'");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg = parse_config(io::read_text(path));
  const auto base = path.parent_path();
  if (!cfg.dataset.empty() && cfg.dataset.is_relative()) cfg.dataset = base / cfg.dataset;
  if (cfg.teacher_ckpt && cfg.teacher_ckpt->is_relative()) cfg.teacher_ckpt = base / *cfg.teacher_ckpt;
  if (cfg.out_dir.is_relative()) cfg.out_dir = base / cfg.out_dir;
  if (const char* env = std::getenv("LGD_SEED"); env && *env) cfg.seed = parse_seed("LGD_SEED", env);
  return cfg;
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "variant = " << to_string(cfg.variant) << '\n'
     << "epochs = " << cfg.epochs << '\n'
     << "batch_size = " << cfg.batch_size << '\n'
     << "base_lr = " << cfg.base_lr << '\n'
     << "lambda_d = " << cfg.weights.lambda_d << '\n'
     << "lambda_n = " << cfg.weights.lambda_n << '\n'
     << "lambda_m = " << cfg.weights.lambda_m << '\n'
     << "seed = " << cfg.seed << '\n'
     << "dataset = " << cfg.dataset.string() << '\n'
     << "teacher_ckpt = " << (cfg.teacher_ckpt ? cfg.teacher_ckpt->string() : "") << '\n'
     << "out_dir = " << cfg.out_dir.string() << '\n'
     << "cosine_mode = " << (cfg.cosine_mode == losses::CosineMode::pooled ? "pooled" : "spatial") << '\n'
     << "joint_teacher = " << (cfg.joint_teacher ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace lgd
