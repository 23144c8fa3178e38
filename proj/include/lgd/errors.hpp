#pragma once

#include <stdexcept>
#include <string>

namespace lgd {

// Base of every error the library raises. The CLI maps subclasses onto exit
// codes, so new failure kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidShape : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class MissingGrad : public Error {
 public:
  using Error::Error;
};

class InvalidStainMatrix : public Error {
 public:
  using Error::Error;
};

class NotPretrained : public Error {
 public:
  using Error::Error;
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class InconsistentVariant : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class Diverged : public Error {
 public:
  explicit Diverged(int epoch);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace lgd
