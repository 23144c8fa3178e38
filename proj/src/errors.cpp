#include "lgd/errors.hpp"

namespace lgd {

IoError::IoError(const std::string& path, const std::string& what)
    : Error(path + ": " + what), path_(path) {}

Diverged::Diverged(int epoch)
    : Error("training diverged: non-finite loss at epoch " + std::to_string(epoch)), epoch_(epoch) {}

}  // namespace lgd
